#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "latids/colouring.hpp"
#include "latids/geometry.hpp"
#include "latids/operator.hpp"
#include "latids/rational.hpp"
#include "latids/spectral.hpp"

namespace latids {

/// Value-space operations the averaging engine is written against. Two
/// instances are provided: plain reals and step functions under the sup norm.
struct ScalarOps {
  using Value = double;
  static Value scale(const Value& v, double f) { return v * f; }
  static Value weighted_sum(std::span<const std::pair<double, const Value*>> terms) {
    double s = 0.0;
    for (const auto& [w, v] : terms) s += w * *v;
    return s;
  }
  static double distance(const Value& a, const Value& b) { return std::abs(a - b); }
  static double norm(const Value& a) { return std::abs(a); }
};

struct StepFunctionOps {
  using Value = CountingFunction;
  static Value scale(const Value& v, double f) { return v.scaled(f); }
  static Value weighted_sum(std::span<const std::pair<double, const Value*>> terms) {
    return CountingFunction::weighted_sum(terms);
  }
  static double distance(const Value& a, const Value& b) { return sup_distance(a, b); }
  static double norm(const Value& a) { return a.total(); }
};

/// A set function together with the data its averaging theory needs: a
/// translation-invariant boundary term controlling the additivity defect and
/// the two linear constants.
template <class Ops>
struct ErgodicFunction {
  using Value = typename Ops::Value;
  std::function<Value(const Region&)> evaluate;
  std::function<double(const Region&)> boundary_term;
  double bound_c = 1.0;  // ||F(Q)|| <= C |Q|
  double bound_d = 0.0;  // b(Q) <= D |Q|
  std::string descriptor;
};

/// Reference pattern frequencies: either exact (closed form for periodic
/// colourings) or the empirical table of the largest computed region. Each
/// entry records where the pattern occurs so invariant set functions can be
/// evaluated on an occurrence.
struct FrequencyReference {
  std::int64_t side = 0;
  std::string source;  // "closed-form" | "largest-j"
  struct Entry {
    Pattern pattern;
    Rational nu;
    Point occurrence;
    std::optional<Point> occurrence2;
  };
  std::vector<Entry> entries;  // sorted by pattern

  const Entry* find(const Pattern& p) const;
  Rational nu_of(const Pattern& p) const;
  Rational nu_total() const;
};

FrequencyReference reference_from_table(const FrequencyTable& table);

/// Exact frequencies for an N-periodic colouring: each residue class of the
/// period cube contributes 1/N^d to its pattern.
FrequencyReference closed_form_periodic_reference(const Colouring& lambda, std::int64_t period,
                                                  std::int64_t side);

/// sum_P |count_P / |Q| - nu_P| over the union of empirical and reference
/// patterns, exact.
Rational frequency_deviation(const FrequencyTable& empirical, const FrequencyReference& ref);

struct BoundTerms {
  double boundary = 0.0;   // b(C_M) / |C_M|
  double van_hove = 0.0;   // (C + D) |dQ_j^M| / |Q_j|
  double deviation = 0.0;  // C * sum_P |empirical - reference|
  double total() const { return boundary + van_hove + deviation; }
};

template <class Ops>
struct ApproximationReport {
  std::int64_t region_volume = 0;
  std::int64_t side_m = 0;
  typename Ops::Value finite_volume;  // F(Q_j) / |Q_j|
  typename Ops::Value pattern_value;  // sum_P nu_P F~(P) / |C_M|
  double delta = 0.0;
  BoundTerms bound;
  double deviation_sum = 0.0;  // sum_P |empirical - reference|, unweighted
  bool certificate_ok = false;
};

/// Both finite-volume approximants of the average of F, their distance
/// Delta(j, M), and the three-term error bound. The certificate flag records
/// whether the measured distance stays below the bound. `precomputed_fq`
/// short-circuits the F(Q_j) evaluation when the caller already has it
/// (grid drivers reuse it across pattern sides).
template <class Ops>
ApproximationReport<Ops> ergodic_average(const ErgodicFunction<Ops>& f, const Colouring& lambda,
                                         const Region& q_j, std::int64_t side_m,
                                         const FrequencyReference& ref,
                                         const typename Ops::Value* precomputed_fq = nullptr) {
  if (q_j.is_empty()) throw std::invalid_argument("ergodic_average: empty region");
  if (ref.side != side_m) throw std::invalid_argument("ergodic_average: reference side mismatch");

  ApproximationReport<Ops> report;
  report.region_volume = q_j.size();
  report.side_m = side_m;
  report.finite_volume =
      Ops::scale(precomputed_fq ? *precomputed_fq : f.evaluate(q_j),
                 1.0 / static_cast<double>(q_j.size()));

  const std::int64_t cell_volume = Box::cube(lambda.dim(), side_m).volume();
  std::vector<typename Ops::Value> values;
  values.reserve(ref.entries.size());
  std::vector<std::pair<double, const typename Ops::Value*>> terms;
  for (const auto& entry : ref.entries) {
    if (!(entry.nu > Rational(0, 1))) continue;
    if (!(pattern_at(lambda, entry.occurrence, side_m) == entry.pattern))
      throw std::runtime_error("ergodic_average: no occurrence of a referenced pattern");
    values.push_back(f.evaluate(Region::box(Box::cube_at(entry.occurrence, side_m))));
    if (entry.occurrence2) {
      const auto again = f.evaluate(Region::box(Box::cube_at(*entry.occurrence2, side_m)));
      if (Ops::distance(values.back(), again) >
          1e-9 * std::max(1.0, Ops::norm(values.back())))
        throw std::runtime_error(
            "ergodic_average: set function differs between matching occurrences");
    }
  }
  std::size_t vi = 0;
  for (const auto& entry : ref.entries) {
    if (!(entry.nu > Rational(0, 1))) continue;
    terms.emplace_back(entry.nu.value() / static_cast<double>(cell_volume), &values[vi++]);
  }
  report.pattern_value = Ops::weighted_sum(terms);
  report.delta = Ops::distance(report.finite_volume, report.pattern_value);

  const FrequencyTable empirical = empirical_frequencies(lambda, side_m, q_j);
  report.deviation_sum = frequency_deviation(empirical, ref).value();

  const Region cell = Region::box(Box::cube(lambda.dim(), side_m));
  report.bound.boundary = f.boundary_term(cell) / static_cast<double>(cell_volume);
  report.bound.van_hove =
      (f.bound_c + f.bound_d) * van_hove_ratio(q_j, side_m).value();
  report.bound.deviation = f.bound_c * report.deviation_sum;
  report.certificate_ok = report.delta <= report.bound.total();
  return report;
}

/// The two apriori bounds on the distance to the limit: first for the
/// finite-volume approximant at Q_j, second for the pattern approximant.
template <class Ops>
std::pair<double, double> apriori_bounds(const ErgodicFunction<Ops>& f, const Colouring& lambda,
                                         const Region& q_j, std::int64_t side_m,
                                         const FrequencyReference& ref) {
  const Region cell = Region::box(Box::cube(lambda.dim(), side_m));
  const double b_cell = f.boundary_term(cell) / static_cast<double>(cell.size());
  const FrequencyTable empirical = empirical_frequencies(lambda, side_m, q_j);
  const double deviation = frequency_deviation(empirical, ref).value();
  const double full = 2.0 * b_cell + f.bound_c * deviation +
                      (f.bound_c + f.bound_d) * van_hove_ratio(q_j, side_m).value();
  return {full, b_cell};
}

/// Validation report for the ErgodicFunction contract, sampled on random
/// boxes and random disjoint unions.
struct ErgodicValidation {
  std::int64_t trials = 0;
  std::int64_t boundedness_failures = 0;
  std::int64_t boundary_bound_failures = 0;
  std::int64_t translation_failures = 0;
  std::int64_t additivity_failures = 0;
  bool passed() const {
    return boundedness_failures + boundary_bound_failures + translation_failures +
               additivity_failures ==
           0;
  }
};

template <class Ops>
ErgodicValidation validate_ergodic_function(const ErgodicFunction<Ops>& f, int d,
                                            std::int64_t trials, std::uint64_t seed) {
  ErgodicValidation v;
  v.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> side(1, 7);
  std::uniform_int_distribution<std::int64_t> pos(-20, 20);
  std::uniform_int_distribution<int> parts(2, 4);

  for (std::int64_t t = 0; t < trials; ++t) {
    // Disjoint boxes by rejection.
    const int m = parts(rng);
    std::vector<Box> boxes;
    for (int k = 0; k < m && static_cast<int>(boxes.size()) < m;) {
      Point lo = Point::zero(d);
      for (int i = 0; i < d; ++i) lo[i] = pos(rng);
      Box candidate = Box::cube_at(lo, side(rng));
      bool ok = true;
      for (const Box& other : boxes)
        if (candidate.intersects(other)) ok = false;
      if (ok) {
        boxes.push_back(candidate);
        ++k;
      } else {
        ++k;  // keep attempts bounded; fewer parts is fine
      }
    }
    if (boxes.size() < 2) continue;

    std::vector<Point> union_points;
    std::vector<typename Ops::Value> parts_values;
    double boundary_sum = 0.0;
    for (const Box& b : boxes) {
      const Region rb = Region::box(b);
      const auto value = f.evaluate(rb);
      if (Ops::norm(value) > f.bound_c * static_cast<double>(b.volume()) + 1e-9)
        ++v.boundedness_failures;
      const double bb = f.boundary_term(rb);
      if (bb > f.bound_d * static_cast<double>(b.volume()) + 1e-9) ++v.boundary_bound_failures;
      Point shift = Point::zero(d);
      for (int i = 0; i < d; ++i) shift[i] = pos(rng);
      if (std::abs(f.boundary_term(rb.translated(shift)) - bb) > 1e-12)
        ++v.translation_failures;
      parts_values.push_back(value);
      boundary_sum += bb;
      b.for_each([&](const Point& p) { union_points.push_back(p); });
    }
    const Region whole = Region::of_points(std::move(union_points));
    std::vector<std::pair<double, const typename Ops::Value*>> terms;
    for (const auto& value : parts_values) terms.emplace_back(1.0, &value);
    const auto sum = Ops::weighted_sum(terms);
    if (Ops::distance(f.evaluate(whole), sum) > boundary_sum + 1e-9) ++v.additivity_failures;
  }
  return v;
}

/// The eigenvalue-count set function of an operator on interior cores at the
/// operator's overall range: the function whose averages the density of
/// states machinery runs on. Almost-additive because restrictions to cores of
/// disjoint sets decouple exactly.
ErgodicFunction<StepFunctionOps> core_counting_function(const OperatorSpec& spec,
                                                        const Colouring& lambda);

struct IdsResult {
  CountingFunction ids;  // n(restriction to Q) / |Q|; total mass = dim_h
  std::int64_t volume = 0;
  int dim_h = 1;
  std::string descriptor;
};

/// Normalised eigenvalue counting function of the restriction to Q.
IdsResult finite_volume_ids(const OperatorSpec& spec, const Colouring& lambda, const Region& q);

/// The pattern approximant sum_P nu_P n_P / |C_M| with n_P the counting
/// function of the restriction to the interior core of an occurrence box.
/// Requires side_m > 2 * overall range so the core is non-empty.
CountingFunction pattern_ids(const OperatorSpec& spec, const Colouring& lambda,
                             std::int64_t side_m, const FrequencyReference& ref);

/// The three-term sup-norm error bound for the distance between the
/// finite-volume counting function on Q_j and the density of states, with the
/// frequency deviation measured against the supplied reference.
BoundTerms ids_bound_terms(const OperatorSpec& spec, const Colouring& lambda, const Region& q_j,
                           std::int64_t side_m, const FrequencyReference& ref);
double ids_error_bound(const OperatorSpec& spec, const Colouring& lambda, const Region& q_j,
                std::int64_t side_m, const FrequencyReference& ref);

/// Sup-norm bound for the pattern approximant alone: 8 dim(H) |d^R C_M|/|C_M|.
double pattern_error_bound(const OperatorSpec& spec, int d, std::int64_t side_m);

struct PeriodicBounds {
  double full = 0.0;     // vs the finite-volume approximant on C_j
  double pattern = 0.0;  // vs the pattern approximant at side M
};

/// Closed-form specialisations of the error bounds for translation-invariant
/// operators on cubes: full = 8 d dimH (4R/M + 5 R^d M / j) + dM/j and
/// pattern = 16 d R dimH / M.
PeriodicBounds periodic_bounds(int d, std::int64_t range, int dim_h, std::int64_t j,
                               std::int64_t side_m);

}  // namespace latids
