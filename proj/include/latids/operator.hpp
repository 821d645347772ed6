#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "latids/colouring.hpp"
#include "latids/geometry.hpp"

namespace latids {

/// A finite-range, colouring-invariant selfadjoint operator on l2(Z^d, H),
/// given by its local rule. kernel(lambda, x, y) is the block coupling the
/// fibre at x into the fibre at y (row site y, column site x); it must
/// satisfy kernel(lambda, y, x) = kernel(lambda, x, y)^T, vanish whenever
/// ||y - x||_inf > range_fr, and read the colouring only inside the cubes of
/// side range_inv anchored at x and y.
struct OperatorSpec {
  int dim_h = 1;
  std::int64_t range_fr = 0;
  std::int64_t range_inv = 0;
  std::function<Eigen::MatrixXd(const Colouring&, const Point&, const Point&)> kernel;
  std::string descriptor;
};

/// max(range_fr, range_inv): the depth at which restrictions decouple.
std::int64_t overall_range(const OperatorSpec& spec);

/// Dense symmetric restriction of the operator to a finite region. Sites are
/// ordered lexicographically; entry blocks follow that order with dim_h rows
/// and columns per site.
struct AssembledMatrix {
  std::vector<Point> sites;
  int dim_h = 1;
  Eigen::MatrixXd mat;

  std::int64_t dimension() const { return static_cast<std::int64_t>(sites.size()) * dim_h; }
  Eigen::Block<const Eigen::MatrixXd> block(std::size_t row_site, std::size_t col_site) const {
    return mat.block(static_cast<Eigen::Index>(row_site) * dim_h,
                     static_cast<Eigen::Index>(col_site) * dim_h, dim_h, dim_h);
  }
};

AssembledMatrix assemble(const OperatorSpec& spec, const Colouring& lambda, const Region& q);

/// Lexicographic offset-to-block comparison key for hopping tables.
using BlockTable = std::map<Point, Eigen::MatrixXd>;

/// Translation-invariant hopping operator from a finite block table
/// (offset delta = y - x maps to the block coupling x into y). Offsets absent
/// from the table are zero; the table must be Hermitian-consistent
/// (block(-delta) = block(delta)^T, supplied or derived).
OperatorSpec spec_periodic_hopping(int d, std::int64_t range, int dim_h, BlockTable blocks);

/// Nearest-neighbour hopping (unit off-diagonal at l1-distance 1) with an
/// optional constant on-site term.
OperatorSpec spec_nn_hopping(int d, double diagonal = 0.0);

/// Hopping restricted to sites whose token carries a finite potential, plus
/// the potential itself on the diagonal; zero on deleted sites.
OperatorSpec spec_anderson_percolation(const OperatorSpec& hop,
                                       std::function<double(int)> potential_of);

/// Adjacency of the visible points under the nearest-neighbour relation
/// (l1-distance one), zero elsewhere.
OperatorSpec spec_visible_laplacian(int d);

struct InvarianceViolation {
  Point x, y, t;
};

struct InvarianceReport {
  std::int64_t samples_requested = 0;
  std::int64_t samples_tested = 0;  // triples whose local patterns matched
  std::vector<InvarianceViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Randomly samples translations with matching local colour patterns and
/// checks block equality. Deterministic for a fixed seed.
InvarianceReport check_invariance(const OperatorSpec& spec, const Colouring& lambda,
                                  std::int64_t sample_budget, std::uint64_t seed);

/// One matrix row per line, space-separated, 17 significant digits.
void write_dense_text(const Eigen::MatrixXd& mat, std::ostream& out);

}  // namespace latids
