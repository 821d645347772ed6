#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "latids/experiment.hpp"
#include "latids/ids.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace latids;

namespace {

Point to_point(const std::vector<std::int64_t>& coords) {
  return Point(std::span<const std::int64_t>(coords.data(), coords.size()));
}

py::tuple from_point(const Point& p) {
  py::tuple t(p.dim());
  for (int i = 0; i < p.dim(); ++i) t[i] = p[i];
  return t;
}

py::object fraction(const Rational& r) {
  return py::module_::import("fractions").attr("Fraction")(r.num, r.den);
}

Alphabet make_alphabet(const std::vector<std::pair<std::string, double>>& tokens) {
  std::vector<Token> list;
  list.reserve(tokens.size());
  for (const auto& [name, payload] : tokens) list.push_back({name, payload});
  return Alphabet(std::move(list));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-volume and pattern-based spectral distributions of "
            "finite-range lattice operators";

  py::class_<Region>(m, "Region")
      .def_static("cube", [](int d, std::int64_t side) { return Region::box(Box::cube(d, side)); },
                  "d"_a, "side"_a)
      .def_static("box",
                  [](const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi) {
                    return Region::box(Box(to_point(lo), to_point(hi)));
                  },
                  "lo"_a, "hi"_a)
      .def_static("of_points",
                  [](const std::vector<std::vector<std::int64_t>>& pts) {
                    std::vector<Point> points;
                    points.reserve(pts.size());
                    for (const auto& p : pts) points.push_back(to_point(p));
                    return Region::of_points(std::move(points));
                  },
                  "points"_a)
      .def_property_readonly("dim", &Region::dim)
      .def("__len__", &Region::size)
      .def("contains",
           [](const Region& q, const std::vector<std::int64_t>& p) {
             return q.contains(to_point(p));
           })
      .def("points", [](const Region& q) {
        py::list out;
        q.for_each([&](const Point& p) { out.append(from_point(p)); });
        return out;
      });

  m.def("s_boundary",
        [](const Region& q, std::int64_t s) { return s_boundary(q, s); }, "q"_a, "s"_a);
  m.def("s_boundary_size", &s_boundary_size, "q"_a, "s"_a);
  m.def("interior_core", &interior_core, "q"_a, "s"_a);
  m.def("van_hove_ratio",
        [](const Region& q, std::int64_t s) { return fraction(van_hove_ratio(q, s)); }, "q"_a,
        "s"_a);
  m.def("covering_grid",
        [](const Region& q, std::int64_t side, const std::vector<std::int64_t>& offset) {
          const CoveringGrid grid = covering_grid(q, side, to_point(offset));
          py::list interior, partial;
          for (const Point& a : grid.interior) interior.append(from_point(a));
          for (const Point& a : grid.partial) partial.append(from_point(a));
          return py::make_tuple(interior, partial);
        },
        "q"_a, "side"_a, "offset"_a);

  py::class_<Colouring>(m, "Colouring")
      .def_property_readonly("dim", &Colouring::dim)
      .def_property_readonly("descriptor", &Colouring::descriptor)
      .def_property_readonly("alphabet_size",
                             [](const Colouring& c) { return c.alphabet().size(); })
      .def("token_name",
           [](const Colouring& c, int i) { return c.alphabet().token(i).name; })
      .def("token_payload",
           [](const Colouring& c, int i) { return c.alphabet().token(i).payload; })
      .def("at", [](const Colouring& c, const std::vector<std::int64_t>& p) {
        return c.at(to_point(p));
      });

  m.def("trivial_colouring", &make_trivial, "d"_a);
  m.def("periodic_colouring",
        [](int d, std::int64_t period, const std::vector<int>& table,
           const std::vector<std::pair<std::string, double>>& tokens) {
          return make_periodic(d, period, table, make_alphabet(tokens));
        },
        "d"_a, "period"_a, "table"_a, "tokens"_a);
  m.def("periodic_coordinate_colouring", &make_periodic_coordinates, "d"_a, "period"_a);
  m.def("percolation_colouring",
        [](int d, const std::vector<std::pair<std::string, double>>& tokens,
           const std::vector<double>& weights, std::uint64_t seed) {
          return make_percolation(d, make_alphabet(tokens), weights, seed);
        },
        "d"_a, "tokens"_a, "weights"_a, "seed"_a);
  m.def("visible_colouring", &make_visible, "d"_a);
  m.def("product_colouring", &make_product, "a"_a, "b"_a);

  py::class_<Pattern>(m, "Pattern")
      .def(py::init([](int d, std::int64_t side, const std::vector<std::uint8_t>& values) {
             return Pattern(d, side, values);
           }),
           "d"_a, "side"_a, "values"_a)
      .def_property_readonly("dim", &Pattern::dim)
      .def_property_readonly("side", &Pattern::side)
      .def_property_readonly("values", &Pattern::values)
      .def("hex", &Pattern::hex)
      .def("__eq__", [](const Pattern& a, const Pattern& b) { return a == b; });

  m.def("pattern_at",
        [](const Colouring& c, const std::vector<std::int64_t>& x, std::int64_t side) {
          return pattern_at(c, to_point(x), side);
        },
        "colouring"_a, "x"_a, "side"_a);
  m.def("count_occurrences", &count_occurrences, "pattern"_a, "colouring"_a, "q"_a);

  py::class_<FrequencyTable>(m, "FrequencyTable")
      .def_readonly("side", &FrequencyTable::side)
      .def_readonly("volume", &FrequencyTable::region_volume)
      .def_readonly("positions", &FrequencyTable::positions)
      .def("frequency",
           [](const FrequencyTable& t, const Pattern& p) { return fraction(t.frequency(p)); })
      .def("entries", [](const FrequencyTable& t) {
        py::list out;
        for (const auto& [pattern, stats] : t.sorted())
          out.append(py::make_tuple(pattern, stats.count, from_point(stats.first_occurrence)));
        return out;
      });

  m.def("empirical_frequencies", &empirical_frequencies, "colouring"_a, "side"_a, "q"_a);

  py::class_<OperatorSpec>(m, "OperatorSpec")
      .def_readonly("dim_h", &OperatorSpec::dim_h)
      .def_readonly("range_fr", &OperatorSpec::range_fr)
      .def_readonly("range_inv", &OperatorSpec::range_inv)
      .def_readonly("descriptor", &OperatorSpec::descriptor)
      .def_property_readonly("overall_range",
                             [](const OperatorSpec& s) { return overall_range(s); });

  m.def("nn_hopping", &spec_nn_hopping, "d"_a, "diagonal"_a = 0.0);
  m.def("periodic_hopping",
        [](int d, std::int64_t range, int dim_h,
           const std::vector<std::pair<std::vector<std::int64_t>, Eigen::MatrixXd>>& blocks) {
          BlockTable table;
          for (const auto& [offset, block] : blocks) table.emplace(to_point(offset), block);
          return spec_periodic_hopping(d, range, dim_h, std::move(table));
        },
        "d"_a, "range"_a, "dim_h"_a, "blocks"_a);
  m.def("anderson_percolation",
        [](const OperatorSpec& hop, const std::vector<double>& potential_by_token) {
          return spec_anderson_percolation(hop, [potential_by_token](int token) {
            return potential_by_token.at(static_cast<std::size_t>(token));
          });
        },
        "hop"_a, "potential_by_token"_a,
        "potential per alphabet token; math.inf deletes the site");
  m.def("visible_laplacian", &spec_visible_laplacian, "d"_a);

  m.def("assemble",
        [](const OperatorSpec& spec, const Colouring& c, const Region& q) {
          AssembledMatrix a = assemble(spec, c, q);
          py::list sites;
          for (const Point& p : a.sites) sites.append(from_point(p));
          return py::make_tuple(a.mat, sites);
        },
        "spec"_a, "colouring"_a, "q"_a, "returns (matrix, sites)");
  m.def("matrix_text",
        [](const Eigen::MatrixXd& mat) {
          std::ostringstream out;
          write_dense_text(mat, out);
          return out.str();
        },
        "mat"_a, "dense text form: one row per line, 17 significant digits");
  m.def("check_invariance",
        [](const OperatorSpec& spec, const Colouring& c, std::int64_t samples,
           std::uint64_t seed) {
          const InvarianceReport report = check_invariance(spec, c, samples, seed);
          return py::make_tuple(report.samples_tested, report.violations.size());
        },
        "spec"_a, "colouring"_a, "samples"_a, "seed"_a,
        "returns (samples_tested, violation_count)");

  py::class_<CountingFunction>(m, "CountingFunction")
      .def_property_readonly("breakpoints", &CountingFunction::breakpoints)
      .def_property_readonly("values", &CountingFunction::values)
      .def("__call__", &CountingFunction::operator())
      .def("left_limit", &CountingFunction::left_limit)
      .def("total", &CountingFunction::total)
      .def("scaled", &CountingFunction::scaled);

  m.def("sym_eigen",
        [](const Eigen::MatrixXd& a, bool want_vectors) {
          EigenResult r = sym_eigen(a, want_vectors);
          return py::make_tuple(r.eigenvalues,
                                want_vectors ? py::cast(*r.eigenvectors) : py::none());
        },
        "a"_a, "want_vectors"_a = false);
  m.def("counting_function",
        [](const std::vector<double>& sorted_eigs) {
          return counting_function(std::span<const double>(sorted_eigs));
        },
        "sorted_eigenvalues"_a);
  m.def("sup_distance", &sup_distance, "f"_a, "g"_a);
  m.def("jumps",
        [](const CountingFunction& f, double threshold, double merge_tol) {
          py::list out;
          for (const Jump& j : jumps(f, threshold, merge_tol))
            out.append(py::make_tuple(j.location, j.size));
          return out;
        },
        "f"_a, "threshold"_a, "merge_tol"_a = 0.0);
  m.def("find_compact_eigenfunction",
        [](const OperatorSpec& spec, const Colouring& c, double lambda, const Region& q,
           double eps) -> py::object {
          const auto found = find_compact_eigenfunction(spec, c, lambda, q, eps);
          if (!found) return py::none();
          py::list sites;
          for (const Point& p : found->sites) sites.append(from_point(p));
          return py::make_tuple(found->u, found->residual, sites);
        },
        "spec"_a, "colouring"_a, "lam"_a, "q"_a, "eps"_a,
        "returns (u, residual, sites) or None");

  py::class_<FrequencyReference>(m, "FrequencyReference")
      .def_readonly("side", &FrequencyReference::side)
      .def_readonly("source", &FrequencyReference::source)
      .def("nu_total", [](const FrequencyReference& r) { return fraction(r.nu_total()); })
      .def("entries", [](const FrequencyReference& r) {
        py::list out;
        for (const auto& e : r.entries)
          out.append(py::make_tuple(e.pattern, fraction(e.nu), from_point(e.occurrence)));
        return out;
      });

  m.def("closed_form_periodic_reference", &closed_form_periodic_reference, "colouring"_a,
        "period"_a, "side"_a);
  m.def("reference_from_table", &reference_from_table, "table"_a);

  py::class_<IdsResult>(m, "IdsResult")
      .def_readonly("ids", &IdsResult::ids)
      .def_readonly("volume", &IdsResult::volume)
      .def_readonly("dim_h", &IdsResult::dim_h)
      .def_readonly("descriptor", &IdsResult::descriptor);

  m.def("finite_volume_ids", &finite_volume_ids, "spec"_a, "colouring"_a, "q"_a);
  m.def("pattern_ids", &pattern_ids, "spec"_a, "colouring"_a, "side"_a, "reference"_a);

  py::class_<BoundTerms>(m, "BoundTerms")
      .def_readonly("boundary", &BoundTerms::boundary)
      .def_readonly("van_hove", &BoundTerms::van_hove)
      .def_readonly("deviation", &BoundTerms::deviation)
      .def("total", &BoundTerms::total);

  m.def("ids_bound_terms", &ids_bound_terms, "spec"_a, "colouring"_a, "q"_a, "side"_a,
        "reference"_a);
  m.def("ids_error_bound", &ids_error_bound, "spec"_a, "colouring"_a, "q"_a, "side"_a, "reference"_a);
  m.def("pattern_error_bound", &pattern_error_bound, "spec"_a, "d"_a, "side"_a);
  m.def("periodic_bounds",
        [](int d, std::int64_t range, int dim_h, std::int64_t j, std::int64_t side) {
          const PeriodicBounds b = periodic_bounds(d, range, dim_h, j, side);
          return py::make_tuple(b.full, b.pattern);
        },
        "d"_a, "range"_a, "dim_h"_a, "j"_a, "side"_a, "returns (full, pattern)");

  m.def("ids_average_report",
        [](const OperatorSpec& spec, const Colouring& c, const Region& q, std::int64_t side,
           const FrequencyReference& ref) {
          const auto report = ergodic_average(core_counting_function(spec, c), c, q, side, ref);
          py::dict out;
          out["delta"] = report.delta;
          out["bound_terms"] = py::make_tuple(report.bound.boundary, report.bound.van_hove,
                                              report.bound.deviation);
          out["bound_total"] = report.bound.total();
          out["certificate_ok"] = report.certificate_ok;
          out["finite_volume"] = report.finite_volume;
          out["pattern_value"] = report.pattern_value;
          return out;
        },
        "spec"_a, "colouring"_a, "q"_a, "side"_a, "reference"_a,
        "finite-volume versus pattern average of the core counting function");
}
