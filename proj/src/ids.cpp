#include "latids/ids.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "latids/detail/parallel.hpp"

namespace latids {

const FrequencyReference::Entry* FrequencyReference::find(const Pattern& p) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), p,
                             [](const Entry& e, const Pattern& key) { return e.pattern < key; });
  if (it == entries.end() || !(it->pattern == p)) return nullptr;
  return &*it;
}

Rational FrequencyReference::nu_of(const Pattern& p) const {
  const Entry* e = find(p);
  return e ? e->nu : Rational(0, 1);
}

Rational FrequencyReference::nu_total() const {
  Rational sum(0, 1);
  for (const auto& e : entries) sum = sum + e.nu;
  return sum;
}

FrequencyReference reference_from_table(const FrequencyTable& table) {
  FrequencyReference ref;
  ref.side = table.side;
  ref.source = "largest-j";
  for (const auto& [pattern, stats] : table.sorted())
    ref.entries.push_back({pattern, Rational(stats.count, table.region_volume),
                           stats.first_occurrence, stats.second_occurrence});
  return ref;
}

FrequencyReference closed_form_periodic_reference(const Colouring& lambda, std::int64_t period,
                                                  std::int64_t side) {
  if (period < 1) throw std::invalid_argument("closed_form_periodic_reference: period >= 1");
  const int d = lambda.dim();
  const Box cell = Box::cube(d, period);
  std::map<Pattern, std::pair<std::int64_t, Point>> buckets;
  cell.for_each([&](const Point& r) {
    Pattern p = pattern_at(lambda, r, side);
    auto [it, fresh] = buckets.try_emplace(std::move(p), std::make_pair(0, r));
    it->second.first += 1;
  });

  FrequencyReference ref;
  ref.side = side;
  ref.source = "closed-form";
  const std::int64_t cell_volume = cell.volume();
  for (const auto& [pattern, info] : buckets) {
    // A second occurrence one period away serves the invariance spot check.
    Point shifted = info.second;
    shifted[0] += period;
    ref.entries.push_back(
        {pattern, Rational(info.first, cell_volume), info.second, shifted});
  }
  return ref;
}

Rational frequency_deviation(const FrequencyTable& empirical, const FrequencyReference& ref) {
  if (empirical.side != ref.side)
    throw std::invalid_argument("frequency_deviation: side mismatch");
  Rational sum(0, 1);
  for (const auto& [pattern, stats] : empirical.entries) {
    const Rational e(stats.count, empirical.region_volume);
    sum = sum + (e - ref.nu_of(pattern)).abs();
  }
  for (const auto& entry : ref.entries)
    if (empirical.entries.find(entry.pattern) == empirical.entries.end())
      sum = sum + entry.nu.abs();
  return sum;
}

ErgodicFunction<StepFunctionOps> core_counting_function(const OperatorSpec& spec,
                                                        const Colouring& lambda) {
  const std::int64_t r = overall_range(spec);
  const int dim_h = spec.dim_h;
  const int d = lambda.dim();
  ErgodicFunction<StepFunctionOps> f;
  f.evaluate = [spec, lambda, r](const Region& q) -> CountingFunction {
    const Region core = interior_core(q, r);
    if (core.is_empty()) return {};
    return counting_function(sym_eigen(assemble(spec, lambda, core).mat, false).eigenvalues);
  };
  f.boundary_term = [r, dim_h](const Region& q) {
    return 4.0 * static_cast<double>(s_boundary_size(q, r)) * dim_h;
  };
  f.bound_c = static_cast<double>(dim_h);
  f.bound_d = 4.0 * static_cast<double>(dim_h) * static_cast<double>(linf_ball_volume(d, r));
  f.descriptor = "core_counting(" + spec.descriptor + ")";
  return f;
}

IdsResult finite_volume_ids(const OperatorSpec& spec, const Colouring& lambda, const Region& q) {
  if (q.is_empty()) throw std::invalid_argument("finite_volume_ids: empty region");
  IdsResult result;
  result.volume = q.size();
  result.dim_h = spec.dim_h;
  result.descriptor = spec.descriptor + " on " + lambda.descriptor();
  const auto eig = sym_eigen(assemble(spec, lambda, q).mat, false);
  result.ids =
      counting_function(eig.eigenvalues).scaled(1.0 / static_cast<double>(result.volume));
  return result;
}

CountingFunction pattern_ids(const OperatorSpec& spec, const Colouring& lambda,
                             std::int64_t side_m, const FrequencyReference& ref) {
  const std::int64_t r = overall_range(spec);
  if (side_m <= 2 * r)
    throw std::invalid_argument("pattern_ids: M too small (empty interior core)");
  if (ref.side != side_m) throw std::invalid_argument("pattern_ids: reference side mismatch");

  const std::int64_t cell_volume = Box::cube(lambda.dim(), side_m).volume();
  std::vector<const FrequencyReference::Entry*> live;
  for (const auto& entry : ref.entries)
    if (entry.nu > Rational(0, 1)) live.push_back(&entry);

  std::vector<CountingFunction> parts(live.size());
  detail::parallel_for(live.size(), [&](std::size_t i) {
    const auto& entry = *live[i];
    if (!(pattern_at(lambda, entry.occurrence, side_m) == entry.pattern))
      throw std::runtime_error("pattern_ids: no occurrence of a referenced pattern");
    const Box cell = Box::cube_at(entry.occurrence, side_m);
    const Region core = interior_core(Region::box(cell), r);
    const AssembledMatrix assembled = assemble(spec, lambda, core);
    if (entry.occurrence2) {
      const Box cell2 = Box::cube_at(*entry.occurrence2, side_m);
      const AssembledMatrix again =
          assemble(spec, lambda, interior_core(Region::box(cell2), r));
      if (!(assembled.mat == again.mat))
        throw std::runtime_error(
            "pattern_ids: restriction differs between occurrences of one pattern");
    }
    parts[i] = counting_function(sym_eigen(assembled.mat, false).eigenvalues);
  });

  std::vector<std::pair<double, const CountingFunction*>> terms;
  terms.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i)
    terms.emplace_back(live[i]->nu.value() / static_cast<double>(cell_volume), &parts[i]);
  return CountingFunction::weighted_sum(terms);
}

BoundTerms ids_bound_terms(const OperatorSpec& spec, const Colouring& lambda, const Region& q_j,
                           std::int64_t side_m, const FrequencyReference& ref) {
  const std::int64_t r = overall_range(spec);
  const int d = lambda.dim();
  const double dim_h = static_cast<double>(spec.dim_h);
  BoundTerms terms;
  terms.boundary =
      8.0 * dim_h * Rational(box_boundary_size(Box::cube(d, side_m), r),
                             Box::cube(d, side_m).volume())
                        .value();
  const FrequencyTable empirical = empirical_frequencies(lambda, side_m, q_j);
  terms.deviation = dim_h * frequency_deviation(empirical, ref).value();
  terms.van_hove = 5.0 * static_cast<double>(linf_ball_volume(d, r)) * dim_h *
                   van_hove_ratio(q_j, side_m).value();
  return terms;
}

double ids_error_bound(const OperatorSpec& spec, const Colouring& lambda, const Region& q_j,
                std::int64_t side_m, const FrequencyReference& ref) {
  return ids_bound_terms(spec, lambda, q_j, side_m, ref).total();
}

double pattern_error_bound(const OperatorSpec& spec, int d, std::int64_t side_m) {
  const std::int64_t r = overall_range(spec);
  return 8.0 * static_cast<double>(spec.dim_h) *
         Rational(box_boundary_size(Box::cube(d, side_m), r), Box::cube(d, side_m).volume())
             .value();
}

PeriodicBounds periodic_bounds(int d, std::int64_t range, int dim_h, std::int64_t j,
                               std::int64_t side_m) {
  if (d < 1 || range < 0 || dim_h < 1 || j < 1 || side_m < 1)
    throw std::invalid_argument("periodic_bounds: positive arguments required");
  PeriodicBounds b;
  const double dd = static_cast<double>(d);
  const double rr = static_cast<double>(range);
  const double jj = static_cast<double>(j);
  const double mm = static_cast<double>(side_m);
  b.full = 8.0 * dd * dim_h * (4.0 * rr / mm + 5.0 * std::pow(rr, dd) * mm / jj) +
           dd * mm / jj;
  b.pattern = dim_h * 16.0 * dd * rr / mm;
  return b;
}

}  // namespace latids
