// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latids/detail/parallel.hpp"
#include "latids/experiment.hpp"
#include "latids/ids.hpp"

using namespace latids;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      note += (note.empty() ? "" : "; ") + what;
    }
  }
};

Region cube_region(int d, std::int64_t side) { return Region::box(Box::cube(d, side)); }

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Criterion 1: the averaging certificate for the core counting function of
// the 1d hopping model over the full (j, M) grid.
Outcome criterion_ergodic_certificate() {
  Outcome outcome;
  const Colouring trivial = make_trivial(1);
  const OperatorSpec hop = spec_nn_hopping(1);
  const ErgodicFunction<StepFunctionOps> shell = core_counting_function(hop, trivial);

  const std::vector<std::int64_t> grid_j{16, 32, 64, 128, 256};
  const std::vector<std::int64_t> grid_m{2, 4, 8, 16};
  int violations = 0;
  for (std::int64_t j : grid_j)
    for (std::int64_t m : grid_m) {
      const FrequencyReference ref = closed_form_periodic_reference(trivial, 1, m);
      const auto report = ergodic_average(shell, trivial, cube_region(1, j), m, ref);
      if (!(report.delta <= report.bound.total())) ++violations;
    }
  outcome.require(violations == 0,
                  "delta exceeded its bound on " + std::to_string(violations) + " cells");
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 2: measured sup distance between the finite-volume curve and the
// pattern approximant stays below the three-term bound, for all three models.
Outcome criterion_sup_norm_bound() {
  Outcome outcome;
  struct Setup {
    std::string name;
    Colouring colouring;
    OperatorSpec spec;
    std::vector<std::int64_t> grid_j;
    std::vector<std::int64_t> grid_m;
  };
  const Alphabet perc_alphabet(
      {{"open", 0.0}, {"closed", std::numeric_limits<double>::infinity()}});
  auto perc_payload = [perc_alphabet](int token) { return perc_alphabet.token(token).payload; };

  std::vector<Setup> setups;
  setups.push_back({"periodic",
                    make_trivial(1),
                    spec_nn_hopping(1),
                    {16, 32, 64, 128, 256},
                    {4, 8, 16}});
  setups.push_back({"percolation",
                    make_percolation(2, perc_alphabet, {0.7, 0.3}, 42),
                    spec_anderson_percolation(spec_nn_hopping(2), perc_payload),
                    {16, 32, 64},
                    {4, 8}});
  setups.push_back({"visible", make_visible(2), spec_visible_laplacian(2), {16, 32, 64}, {4, 8}});

  for (const Setup& setup : setups) {
    const int d = setup.colouring.dim();
    std::map<std::int64_t, FrequencyReference> refs;
    for (std::int64_t m : setup.grid_m) {
      if (setup.name == "periodic")
        refs.emplace(m, closed_form_periodic_reference(setup.colouring, 1, m));
      else
        refs.emplace(m, reference_from_table(empirical_frequencies(
                            setup.colouring, m, cube_region(d, setup.grid_j.back()))));
    }

    std::vector<CountingFunction> fv(setup.grid_j.size());
    detail::parallel_for(setup.grid_j.size(), [&](std::size_t i) {
      fv[i] = finite_volume_ids(setup.spec, setup.colouring, cube_region(d, setup.grid_j[i])).ids;
    });
    std::map<std::int64_t, CountingFunction> pattern;
    for (std::int64_t m : setup.grid_m)
      pattern.emplace(m, pattern_ids(setup.spec, setup.colouring, m, refs.at(m)));

    int violations = 0;
    for (std::size_t i = 0; i < setup.grid_j.size(); ++i)
      for (std::int64_t m : setup.grid_m) {
        const double measured = sup_distance(fv[i], pattern.at(m));
        const double bound = ids_error_bound(setup.spec, setup.colouring,
                                      cube_region(d, setup.grid_j[i]), m, refs.at(m));
        if (!(measured <= bound)) ++violations;
      }
    outcome.require(violations == 0, setup.name + ": " + std::to_string(violations) +
                                         " cells exceeded the bound");
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Criteria 3 and 4 share the j = 2000 reference curve of the 1d hopping
// model, whose limit curve is 1 - arccos(E/2)/pi.
struct HoppingReference {
  Eigen::VectorXd eigenvalues;
  CountingFunction curve;
};

HoppingReference hopping_reference(std::int64_t j) {
  const AssembledMatrix m =
      assemble(spec_nn_hopping(1), make_trivial(1), cube_region(1, j));
  HoppingReference ref;
  ref.eigenvalues = sym_eigen(m.mat, false).eigenvalues;
  ref.curve =
      counting_function(ref.eigenvalues).scaled(1.0 / static_cast<double>(j));
  return ref;
}

double arccos_limit(double e) {
  if (e <= -2.0) return 0.0;
  if (e >= 2.0) return 1.0;
  return 1.0 - std::acos(e / 2.0) / std::numbers::pi;
}

// Exact sup of |step - continuous monotone|: attained against a breakpoint
// value or its left limit.
double sup_distance_to_limit(const CountingFunction& f) {
  double best = 0.0;
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    const double b = f.breakpoints()[i];
    best = std::max(best, std::abs(f.values()[i] - arccos_limit(b)));
    best = std::max(best, std::abs((i ? f.values()[i - 1] : 0.0) - arccos_limit(b)));
  }
  return best;
}

Outcome criterion_closed_form_oracle(const HoppingReference& ref) {
  Outcome outcome;
  const std::int64_t j = 2000;
  double worst_eig = 0.0;
  for (std::int64_t i = 0; i < j; ++i) {
    const double expect = 2.0 * std::cos((j - i) * std::numbers::pi / (j + 1));
    worst_eig = std::max(worst_eig, std::abs(ref.eigenvalues(i) - expect));
  }
  outcome.require(worst_eig <= 1e-9,
                  "eigenvalue error " + std::to_string(worst_eig) + " above 1e-9");

  const double dist = sup_distance_to_limit(ref.curve);
  outcome.require(dist <= 5e-3,
                  "sup distance to the arccos curve " + std::to_string(dist) + " above 5e-3");
  return outcome;
}

Outcome criterion_pattern_bound(const HoppingReference& ref) {
  Outcome outcome;
  const Colouring trivial = make_trivial(1);
  const OperatorSpec hop = spec_nn_hopping(1);
  const double reference_slack = 5e-3;  // certified by criterion 3
  for (std::int64_t m : {8, 16, 32}) {
    const CountingFunction approx =
        pattern_ids(hop, trivial, m, closed_form_periodic_reference(trivial, 1, m));
    const double measured = sup_distance(ref.curve, approx);
    const double bound = 16.0 / static_cast<double>(m) + reference_slack;
    outcome.require(measured <= bound, "M=" + std::to_string(m) + ": distance " +
                                           std::to_string(measured) + " above " +
                                           std::to_string(bound));
    const PeriodicBounds closed = periodic_bounds(1, 1, 1, 2000, m);
    outcome.require(std::abs(closed.pattern - 16.0 / static_cast<double>(m)) < 1e-15,
                    "closed-form pattern bound mismatch");
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 5: the coordinate-subspace counting bound on random instances,
// plus exact decoupling of disjoint-core assemblies.
Outcome criterion_subspace_suite() {
  Outcome outcome;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dims(2, 20);
  std::normal_distribution<double> gauss(0.0, 2.0);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dims(rng);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k <= i; ++k) {
        a(i, k) = gauss(rng);
        a(k, i) = a(i, k);
      }
    std::vector<Eigen::Index> axes(n);
    std::iota(axes.begin(), axes.end(), 0);
    std::shuffle(axes.begin(), axes.end(), rng);
    axes.resize(std::uniform_int_distribution<int>(0, n)(rng));
    std::sort(axes.begin(), axes.end());
    const double dist = sup_distance(counting_function(sym_eigen(a, false).eigenvalues),
                                     restriction_counting(a, axes));
    if (!(dist <= 4.0 * static_cast<double>(n - axes.size()))) ++violations;
  }
  outcome.require(violations == 0,
                  std::to_string(violations) + " subspace-bound violations in 1000 trials");

  // Exact decoupling: restriction to a union of depth-R cores of disjoint
  // boxes equals the direct sum of the individual restrictions.
  const Colouring vis = make_visible(2);
  const OperatorSpec spec = spec_visible_laplacian(2);
  const std::int64_t r = overall_range(spec);
  std::mt19937_64 rng2(7);
  std::uniform_int_distribution<std::int64_t> off(-12, 12), side(3, 6);
  int exact_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Box> boxes;
    for (int k = 0; k < 3; ++k) {
      const Box candidate = Box::cube_at(Point{off(rng2), off(rng2)}, side(rng2));
      bool disjoint = true;
      for (const Box& other : boxes) disjoint = disjoint && !candidate.intersects(other);
      if (disjoint) boxes.push_back(candidate);
    }
    if (boxes.size() < 2) continue;
    std::vector<Point> all;
    std::vector<AssembledMatrix> parts;
    bool any_empty = false;
    for (const Box& b : boxes) {
      const Region core = interior_core(Region::box(b), r);
      if (core.is_empty()) {
        any_empty = true;
        break;
      }
      for (const Point& p : core.points()) all.push_back(p);
      parts.push_back(assemble(spec, vis, core));
    }
    if (any_empty) continue;
    const AssembledMatrix whole = assemble(spec, vis, Region::of_points(all));
    for (std::size_t i = 0; i < whole.sites.size(); ++i)
      for (std::size_t k = 0; k < whole.sites.size(); ++k) {
        double expect = 0.0;
        for (const AssembledMatrix& part : parts) {
          const auto it_i = std::lower_bound(part.sites.begin(), part.sites.end(), whole.sites[i]);
          const auto it_k = std::lower_bound(part.sites.begin(), part.sites.end(), whole.sites[k]);
          const bool has_i = it_i != part.sites.end() && *it_i == whole.sites[i];
          const bool has_k = it_k != part.sites.end() && *it_k == whole.sites[k];
          if (has_i && has_k)
            expect = part.mat(it_i - part.sites.begin(), it_k - part.sites.begin());
        }
        if (whole.mat(i, k) != expect) ++exact_failures;
      }
  }
  outcome.require(exact_failures == 0,
                  std::to_string(exact_failures) + " decoupling entries differ");
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 6: frequency-sum identity, closed-form periodic frequencies and
// the visible density against an independent gcd scan.
Outcome criterion_frequency_exactness() {
  Outcome outcome;

  const Alphabet perc_alphabet({{"open", 0.0}, {"closed", 0.0}});
  const std::vector<std::pair<Colouring, std::int64_t>> runs = {
      {make_trivial(1), 3},
      {make_periodic(1, 2, {0, 1}, Alphabet({{"a", 0.0}, {"b", 0.0}})), 2},
      {make_percolation(2, perc_alphabet, {0.7, 0.3}, 42), 3},
      {make_visible(2), 2},
  };
  for (const auto& [lambda, m] : runs) {
    const std::int64_t j = lambda.dim() == 1 ? 64 : 24;
    const FrequencyTable table = empirical_frequencies(lambda, m, cube_region(lambda.dim(), j));
    std::int64_t total = 0;
    for (const auto& [pattern, stats] : table.entries) total += stats.count;
    std::int64_t positions = 1;
    for (int i = 0; i < lambda.dim(); ++i) positions *= j - m + 1;
    outcome.require(total == table.positions && table.positions == positions,
                    lambda.descriptor() + ": frequency-sum identity broken");
  }

  // Single-site frequencies of periodic colourings are their cell rates.
  for (std::int64_t period : {1, 2, 3}) {
    const Colouring colouring = make_periodic_coordinates(1, period);
    const FrequencyTable table =
        empirical_frequencies(colouring, 1, cube_region(1, period * 12));
    for (const auto& [pattern, stats] : table.entries)
      outcome.require(table.frequency(pattern) == Rational(1, period),
                      "periodic cell rate mismatch at N=" + std::to_string(period));
    const Colouring plane = make_periodic_coordinates(2, period);
    const FrequencyTable table2 =
        empirical_frequencies(plane, 1, cube_region(2, period * 6));
    for (const auto& [pattern, stats] : table2.entries)
      outcome.require(table2.frequency(pattern) == Rational(1, period * period),
                      "periodic cell rate mismatch in d=2 at N=" + std::to_string(period));
  }

  // Visible density on C_1001 against the direct gcd count.
  const Box big = Box::cube(2, 1001);
  std::int64_t oracle = 0;
  big.for_each([&](const Point& p) {
    const std::int64_t g = std::gcd(p[0], p[1]);
    if ((p[0] == 0 && p[1] == 0) || g == 1) ++oracle;
  });
  const FrequencyTable table = empirical_frequencies(make_visible(2), 1, Region::box(big));
  const Rational measured = table.frequency(Pattern(2, 1, {1}));
  outcome.require(measured == Rational(oracle, big.volume()),
                  "visible count differs from the gcd oracle");
  const double density = measured.value();
  outcome.require(std::abs(density - static_cast<double>(oracle) /
                                         static_cast<double>(big.volume())) <= 5e-3,
                  "visible density outside the oracle band");
  outcome.require(std::abs(density - 0.6079) <= 5e-3, "visible density far from 0.6079");
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 7: jumps and compactly supported eigenfunctions, both directions.
Outcome criterion_jump_roundtrip() {
  Outcome outcome;

  // Percolation: the zero cluster carries at least the closed-site mass and
  // an exact eigenfunction.
  const Alphabet alphabet({{"open", 0.0}, {"closed", std::numeric_limits<double>::infinity()}});
  auto payload = [alphabet](int token) { return alphabet.token(token).payload; };
  const Colouring perc = make_percolation(2, alphabet, {0.7, 0.3}, 42);
  const OperatorSpec spec = spec_anderson_percolation(spec_nn_hopping(2), payload);
  const std::int64_t j = 40;
  const Region q = cube_region(2, j);

  std::int64_t closed = 0;
  q.for_each([&](const Point& p) { closed += perc.at(p) == 1 ? 1 : 0; });
  const double closed_rate = static_cast<double>(closed) / static_cast<double>(q.size());

  const IdsResult fv = finite_volume_ids(spec, perc, q);
  double scale = 1.0;
  for (double b : fv.ids.breakpoints()) scale = std::max(scale, std::abs(b));
  const auto found = jumps(fv.ids, 0.05, 1e-9 * scale);
  double zero_mass = 0.0;
  for (const auto& jump : found)
    if (std::abs(jump.location) <= 1e-9) zero_mass = jump.size;
  outcome.require(zero_mass >= closed_rate - 1e-12,
                  "zero-cluster mass below the closed-site rate");

  const auto mode = find_compact_eigenfunction(spec, perc, 0.0, q, 1e-8);
  outcome.require(mode.has_value(), "no eigenfunction found at 0 for percolation");
  if (mode) outcome.require(mode->residual <= 1e-12, "percolation residual above 1e-12");

  // Periodic hopping: nothing at 0, confirmed by the exhaustive oracle.
  const Colouring trivial = make_trivial(1);
  const OperatorSpec hop = spec_nn_hopping(1);
  const auto nothing = find_compact_eigenfunction(hop, trivial, 0.0, cube_region(1, 30), 1e-3);
  outcome.require(!nothing.has_value(), "periodic hopping produced a compact eigenfunction");

  // Exhaustive small-support search over every subset of C_16.
  const int n = 16;
  Eigen::MatrixXd wide = Eigen::MatrixXd::Zero(n + 2, n);
  for (int col = 0; col < n; ++col)
    for (int row = -1; row <= n; ++row) {
      const double v = hop.kernel(trivial, Point{static_cast<std::int64_t>(col)},
                                  Point{static_cast<std::int64_t>(row)})(0, 0);
      if (v != 0.0) wide(row + 1, col) = v;
    }
  double global_min = 1e9;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) support.push_back(i);
    Eigen::MatrixXd sub(n + 2, support.size());
    for (std::size_t c = 0; c < support.size(); ++c) sub.col(c) = wide.col(support[c]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    global_min = std::min(global_min, svd.singularValues().minCoeff());
  }
  outcome.require(global_min > 1e-3, "exhaustive oracle found support with residual below 1e-3");
  return outcome;
}

// ---------------------------------------------------------------------------
// Criterion 8: repeated runs with one config and seed emit identical bytes.
Outcome criterion_determinism() {
  Outcome outcome;
  ExperimentConfig config;
  config.model = "percolation";
  config.d = 2;
  config.p_closed = 0.3;
  config.seed = 42;
  config.grid_j = {16};
  config.grid_m = {4};

  auto read_all = [](const fs::path& dir) {
    std::map<std::string, std::string> bytes;
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::ifstream in(entry.path(), std::ios::binary);
      std::ostringstream buffer;
      buffer << in.rdbuf();
      bytes[entry.path().filename().string()] = buffer.str();
    }
    return bytes;
  };

  const fs::path base = fs::path("acceptance_out");
  fs::remove_all(base);
  config.out_dir = (base / "first").string();
  const int rc1 = cmd_ids(config);
  config.out_dir = (base / "second").string();
  const int rc2 = cmd_ids(config);
  outcome.require(rc1 == 0 && rc2 == 0, "cmd_ids reported certificate violations");

  const auto first = read_all(base / "first");
  const auto second = read_all(base / "second");
  outcome.require(first.size() == second.size() && !first.empty(), "file sets differ");
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    outcome.require(it != second.end() && it->second == bytes, name + " differs between runs");
  }
  return outcome;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&failures](int id, const std::string& name, const Outcome& outcome,
                            double seconds, double limit) {
    bool ok = outcome.ok;
    std::string note = outcome.note;
    if (limit > 0.0 && seconds > limit) {
      ok = false;
      note += (note.empty() ? "" : "; ") + std::string("runtime limit exceeded");
    }
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                seconds, note.empty() ? "" : " -- ", note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  };

  {
    const double t0 = now_seconds();
    const Outcome o = criterion_ergodic_certificate();
    report(1, "averaging certificate on the (j, M) grid", o, now_seconds() - t0, 120.0);
  }
  {
    const double t0 = now_seconds();
    const Outcome o = criterion_sup_norm_bound();
    report(2, "sup-norm bound for all three models", o, now_seconds() - t0, 600.0);
  }
  HoppingReference ref = hopping_reference(2000);
  {
    const double t0 = now_seconds();
    const Outcome o = criterion_closed_form_oracle(ref);
    report(3, "closed-form curve oracle at j=2000", o, now_seconds() - t0, 0.0);
  }
  {
    const double t0 = now_seconds();
    const Outcome o = criterion_pattern_bound(ref);
    report(4, "pattern approximant bound 16/M", o, now_seconds() - t0, 0.0);
  }
  {
    const double t0 = now_seconds();
    const Outcome o = criterion_subspace_suite();
    report(5, "subspace bound and exact decoupling", o, now_seconds() - t0, 0.0);
  }
  {
    const double t0 = now_seconds();
    const Outcome o = criterion_frequency_exactness();
    report(6, "frequency exactness and visible density", o, now_seconds() - t0, 0.0);
  }
  {
    const double t0 = now_seconds();
    const Outcome o = criterion_jump_roundtrip();
    report(7, "jump and eigenfunction round trip", o, now_seconds() - t0, 0.0);
  }
  {
    const double t0 = now_seconds();
    const Outcome o = criterion_determinism();
    report(8, "byte-identical repeated runs", o, now_seconds() - t0, 0.0);
  }

  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
