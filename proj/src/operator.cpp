#include "latids/operator.hpp"

#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "latids/detail/format.hpp"

namespace latids {

std::int64_t overall_range(const OperatorSpec& spec) {
  return std::max(spec.range_fr, spec.range_inv);
}

AssembledMatrix assemble(const OperatorSpec& spec, const Colouring& lambda, const Region& q) {
  if (q.is_empty()) throw std::invalid_argument("assemble: empty region");
  if (q.dim() != lambda.dim()) throw std::invalid_argument("assemble: dimension mismatch");

  AssembledMatrix out;
  out.sites = q.points();
  out.dim_h = spec.dim_h;
  const std::int64_t n = out.dimension();
  out.mat = Eigen::MatrixXd::Zero(n, n);

  std::unordered_map<Point, std::size_t, PointHash> site_index;
  site_index.reserve(out.sites.size() * 2);
  for (std::size_t i = 0; i < out.sites.size(); ++i) site_index.emplace(out.sites[i], i);

  const std::int64_t r = spec.range_fr;
  const int d = q.dim();
  const Box offsets =
      r > 0 ? Box(Point::constant(d, -r), Point::constant(d, r)) : Box::cube(d, 1);

  for (std::size_t ix = 0; ix < out.sites.size(); ++ix) {
    const Point& x = out.sites[ix];
    offsets.for_each([&](const Point& delta) {
      const Point y = x + delta;
      if (y < x) return;  // fill the upper pair once, mirror the transpose
      auto it = site_index.find(y);
      if (it == site_index.end()) return;
      const std::size_t iy = it->second;
      Eigen::MatrixXd block = spec.kernel(lambda, x, y);
      if (block.rows() != spec.dim_h || block.cols() != spec.dim_h)
        throw std::runtime_error("assemble: kernel returned a block of wrong size");
      if (ix == iy) {
        if (block != block.transpose().eval())
          throw std::runtime_error("assemble: diagonal block is not symmetric");
        out.mat.block(static_cast<Eigen::Index>(ix) * spec.dim_h,
                      static_cast<Eigen::Index>(ix) * spec.dim_h, spec.dim_h, spec.dim_h) = block;
      } else {
        out.mat.block(static_cast<Eigen::Index>(iy) * spec.dim_h,
                      static_cast<Eigen::Index>(ix) * spec.dim_h, spec.dim_h, spec.dim_h) = block;
        out.mat.block(static_cast<Eigen::Index>(ix) * spec.dim_h,
                      static_cast<Eigen::Index>(iy) * spec.dim_h, spec.dim_h, spec.dim_h) =
            block.transpose();
      }
    });
  }
  return out;
}

OperatorSpec spec_periodic_hopping(int d, std::int64_t range, int dim_h, BlockTable blocks) {
  if (range < 0) throw std::invalid_argument("spec_periodic_hopping: negative range");
  if (dim_h < 1) throw std::invalid_argument("spec_periodic_hopping: dim_h must be >= 1");

  // Complete and validate: block(-delta) == block(delta)^T.
  BlockTable table = std::move(blocks);
  for (const auto& [delta, block] : table) {
    if (delta.dim() != d) throw std::invalid_argument("spec_periodic_hopping: offset dimension");
    if (linf_norm(delta) > range)
      throw std::invalid_argument("spec_periodic_hopping: offset beyond range");
    if (block.rows() != dim_h || block.cols() != dim_h)
      throw std::invalid_argument("spec_periodic_hopping: block size mismatch");
  }
  BlockTable completed = table;
  for (const auto& [delta, block] : table) {
    const Point neg = -delta;
    auto it = completed.find(neg);
    if (it == completed.end()) {
      completed.emplace(neg, block.transpose());
    } else if (it->second != block.transpose().eval()) {
      throw std::invalid_argument("spec_periodic_hopping: table is not Hermitian-consistent");
    }
  }

  auto shared = std::make_shared<BlockTable>(std::move(completed));
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(dim_h, dim_h);
  OperatorSpec spec;
  spec.dim_h = dim_h;
  spec.range_fr = range;
  spec.range_inv = 0;
  spec.kernel = [shared, zero](const Colouring&, const Point& x, const Point& y) {
    auto it = shared->find(y - x);
    return it == shared->end() ? zero : it->second;
  };
  spec.descriptor = "periodic_hopping(R=" + std::to_string(range) + ")";
  return spec;
}

OperatorSpec spec_nn_hopping(int d, double diagonal) {
  BlockTable blocks;
  for (int axis = 0; axis < d; ++axis) {
    blocks.emplace(Point::unit(d, axis), Eigen::MatrixXd::Constant(1, 1, 1.0));
    blocks.emplace(-Point::unit(d, axis), Eigen::MatrixXd::Constant(1, 1, 1.0));
  }
  if (diagonal != 0.0)
    blocks.emplace(Point::zero(d), Eigen::MatrixXd::Constant(1, 1, diagonal));
  return spec_periodic_hopping(d, 1, 1, std::move(blocks));
}

OperatorSpec spec_anderson_percolation(const OperatorSpec& hop,
                                       std::function<double(int)> potential_of) {
  if (!potential_of) throw std::invalid_argument("spec_anderson_percolation: missing potential");
  if (hop.range_inv != 0)
    throw std::invalid_argument(
        "spec_anderson_percolation: hopping part must be colouring-independent");

  const int dim_h = hop.dim_h;
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(dim_h, dim_h);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim_h, dim_h);
  auto hop_kernel = hop.kernel;

  OperatorSpec spec;
  spec.dim_h = dim_h;
  spec.range_fr = hop.range_fr;
  spec.range_inv = 1;
  spec.kernel = [hop_kernel, potential_of, zero, eye](const Colouring& lambda, const Point& x,
                                                      const Point& y) -> Eigen::MatrixXd {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double vx = potential_of(lambda.at(x));
    if (x == y) return vx == inf ? zero : Eigen::MatrixXd(vx * eye);
    const double vy = potential_of(lambda.at(y));
    if (vx == inf || vy == inf) return zero;
    return hop_kernel(lambda, x, y);
  };
  spec.descriptor = "anderson_percolation(" + hop.descriptor + ")";
  return spec;
}

OperatorSpec spec_visible_laplacian(int d) {
  if (d < 1 || d > kMaxDim)
    throw std::invalid_argument("spec_visible_laplacian: dimension out of range");
  OperatorSpec spec;
  spec.dim_h = 1;
  spec.range_fr = 1;
  spec.range_inv = 1;
  spec.kernel = [](const Colouring& lambda, const Point& x, const Point& y) {
    double v = 0.0;
    if (l1_dist(x, y) == 1 && lambda.at(x) == 1 && lambda.at(y) == 1) v = 1.0;
    return Eigen::MatrixXd::Constant(1, 1, v);
  };
  spec.descriptor = "visible_laplacian";
  return spec;
}

namespace {

// Def.-style invariance window: the union of the side-range_inv cubes
// anchored at x and y (empty when range_inv = 0).
std::vector<Point> invariance_window(const Point& x, const Point& y, std::int64_t range_inv) {
  std::vector<Point> window;
  if (range_inv < 1) return window;
  Box::cube_at(x, range_inv).for_each([&](const Point& p) { window.push_back(p); });
  Box::cube_at(y, range_inv).for_each([&](const Point& p) {
    if (!Box::cube_at(x, range_inv).contains(p)) window.push_back(p);
  });
  return window;
}

}  // namespace

InvarianceReport check_invariance(const OperatorSpec& spec, const Colouring& lambda,
                                  std::int64_t sample_budget, std::uint64_t seed) {
  if (sample_budget < 1) throw std::invalid_argument("check_invariance: budget must be >= 1");
  InvarianceReport report;
  report.samples_requested = sample_budget;

  std::mt19937_64 rng(seed);
  const int d = lambda.dim();
  std::uniform_int_distribution<std::int64_t> coord(-40, 40);
  std::uniform_int_distribution<std::int64_t> offset(-spec.range_fr, spec.range_fr);

  const std::int64_t max_attempts = sample_budget * 400;
  for (std::int64_t attempt = 0;
       attempt < max_attempts && report.samples_tested < sample_budget; ++attempt) {
    Point x = Point::zero(d), t = Point::zero(d);
    for (int i = 0; i < d; ++i) {
      x[i] = coord(rng);
      t[i] = coord(rng);
    }
    Point y = x;
    for (int i = 0; i < d; ++i) y[i] += spec.range_fr > 0 ? offset(rng) : 0;

    bool match = true;
    for (const Point& w : invariance_window(x, y, spec.range_inv))
      if (lambda.at(w) != lambda.at(w + t)) {
        match = false;
        break;
      }
    if (!match) continue;

    ++report.samples_tested;
    const Eigen::MatrixXd a = spec.kernel(lambda, x, y);
    const Eigen::MatrixXd b = spec.kernel(lambda, x + t, y + t);
    if (a != b) report.violations.push_back({x, y, t});
  }
  return report;
}

void write_dense_text(const Eigen::MatrixXd& mat, std::ostream& out) {
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j) out << ' ';
      out << detail::fmt17(mat(i, j));
    }
    out << '\n';
  }
}

}  // namespace latids
