#include "latids/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latids/detail/format.hpp"

namespace latids {

CountingFunction CountingFunction::from_jumps(std::vector<std::pair<double, double>> jumps) {
  std::sort(jumps.begin(), jumps.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  CountingFunction f;
  double cum = 0.0;
  for (const auto& [loc, size] : jumps) {
    if (size < 0.0) throw std::invalid_argument("CountingFunction: negative jump");
    if (size == 0.0) continue;
    cum += size;
    if (!f.breakpoints_.empty() && f.breakpoints_.back() == loc) {
      f.values_.back() = cum;
    } else {
      f.breakpoints_.push_back(loc);
      f.values_.push_back(cum);
    }
  }
  return f;
}

CountingFunction CountingFunction::from_sorted_eigenvalues(std::span<const double> eigs) {
  CountingFunction f;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    if (i + 1 < eigs.size() && eigs[i + 1] < eigs[i])
      throw std::invalid_argument("CountingFunction: eigenvalues not sorted");
    if (!f.breakpoints_.empty() && f.breakpoints_.back() == eigs[i]) {
      f.values_.back() += 1.0;
    } else {
      f.breakpoints_.push_back(eigs[i]);
      f.values_.push_back(f.total() + 1.0);
    }
  }
  return f;
}

double CountingFunction::operator()(double lambda) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), lambda);
  if (it == breakpoints_.begin()) return 0.0;
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double CountingFunction::left_limit(double lambda) const {
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), lambda);
  if (it == breakpoints_.begin()) return 0.0;
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

CountingFunction CountingFunction::scaled(double factor) const {
  if (factor < 0.0) throw std::invalid_argument("CountingFunction: negative scale");
  if (factor == 0.0) return {};
  CountingFunction f = *this;
  for (double& v : f.values_) v *= factor;
  return f;
}

CountingFunction CountingFunction::weighted_sum(
    std::span<const std::pair<double, const CountingFunction*>> terms) {
  std::vector<std::pair<double, double>> jumps;
  for (const auto& [w, f] : terms) {
    if (w < 0.0) throw std::invalid_argument("weighted_sum: negative weight");
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < f->breakpoints().size(); ++i)
      jumps.emplace_back(f->breakpoints()[i], w * f->jump_at(i));
  }
  return from_jumps(std::move(jumps));
}

void CountingFunction::write_csv(std::ostream& out) const {
  out << "breakpoint,cumulative_value\n";
  for (std::size_t i = 0; i < breakpoints_.size(); ++i)
    out << detail::fmt17(breakpoints_[i]) << ',' << detail::fmt17(values_[i]) << '\n';
}

double sup_distance(const CountingFunction& f, const CountingFunction& g) {
  double best = 0.0;
  std::size_t i = 0, j = 0;
  double fv = 0.0, gv = 0.0;  // values just below the current breakpoint
  const auto& fb = f.breakpoints();
  const auto& gb = g.breakpoints();
  while (i < fb.size() || j < gb.size()) {
    double b;
    if (j >= gb.size() || (i < fb.size() && fb[i] < gb[j]))
      b = fb[i];
    else
      b = gb[j];
    best = std::max(best, std::abs(fv - gv));  // left limit at b
    if (i < fb.size() && fb[i] == b) fv = f.values()[i++];
    if (j < gb.size() && gb[j] == b) gv = g.values()[j++];
    best = std::max(best, std::abs(fv - gv));  // value at b
  }
  return best;
}

std::vector<Jump> jumps(const CountingFunction& f, double threshold, double merge_tol) {
  if (threshold <= 0.0) throw std::invalid_argument("jumps: threshold must be positive");
  std::vector<Jump> out;
  const auto& bp = f.breakpoints();
  std::size_t i = 0;
  while (i < bp.size()) {
    std::size_t end = i + 1;
    while (end < bp.size() && bp[end] - bp[end - 1] <= merge_tol) ++end;
    double mass = 0.0, peak = 0.0, where = bp[i];
    for (std::size_t k = i; k < end; ++k) {
      const double jk = f.jump_at(k);
      mass += jk;
      if (jk > peak) {
        peak = jk;
        where = bp[k];
      }
    }
    if (mass >= threshold) out.push_back({where, mass});
    i = end;
  }
  return out;
}

EigenResult sym_eigen(const Eigen::MatrixXd& a, bool want_vectors) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eigen: matrix not square");
  if (a.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eigen: eigensolver failed to converge");
  EigenResult result;
  result.eigenvalues = solver.eigenvalues();
  if (want_vectors) {
    result.eigenvectors = solver.eigenvectors();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    result.residual =
        (a * *result.eigenvectors - *result.eigenvectors * result.eigenvalues.asDiagonal())
            .cwiseAbs()
            .maxCoeff() /
        scale;
  }
  return result;
}

CountingFunction counting_function(std::span<const double> sorted_eigenvalues) {
  return CountingFunction::from_sorted_eigenvalues(sorted_eigenvalues);
}

CountingFunction counting_function(const Eigen::VectorXd& sorted_eigenvalues) {
  return CountingFunction::from_sorted_eigenvalues(
      std::span<const double>(sorted_eigenvalues.data(),
                              static_cast<std::size_t>(sorted_eigenvalues.size())));
}

CountingFunction restriction_counting(const Eigen::MatrixXd& a,
                                      std::span<const Eigen::Index> axes) {
  if (axes.empty()) return {};
  Eigen::MatrixXd sub(axes.size(), axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = 0; j < axes.size(); ++j) sub(i, j) = a(axes[i], axes[j]);
  return counting_function(sym_eigen(sub, false).eigenvalues);
}

std::optional<CompactEigenfunction> find_compact_eigenfunction(const OperatorSpec& spec,
                                                               const Colouring& lambda_col,
                                                               double lambda, const Region& q,
                                                               double eps) {
  if (eps <= 0.0) throw std::invalid_argument("find_compact_eigenfunction: eps must be > 0");
  const std::int64_t r = overall_range(spec);
  const Region core = interior_core(q, r);
  if (core.is_empty())
    throw std::invalid_argument("find_compact_eigenfunction: region too small (empty core)");

  const AssembledMatrix assembled = assemble(spec, lambda_col, q);
  const EigenResult eig = sym_eigen(assembled.mat, true);

  std::vector<bool> in_core(assembled.sites.size());
  for (std::size_t i = 0; i < assembled.sites.size(); ++i)
    in_core[i] = core.contains(assembled.sites[i]);

  std::optional<CompactEigenfunction> best;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (std::abs(eig.eigenvalues(k) - lambda) > eps) continue;
    Eigen::VectorXd u = eig.eigenvectors->col(k);
    for (std::size_t site = 0; site < assembled.sites.size(); ++site)
      if (!in_core[site])
        u.segment(static_cast<Eigen::Index>(site) * spec.dim_h, spec.dim_h).setZero();
    const double mass = u.norm();
    if (mass < 1e-14) continue;
    u /= mass;
    const double residual = (assembled.mat * u - lambda * u).norm();
    if (residual < eps && (!best || residual < best->residual)) {
      best = CompactEigenfunction{assembled.sites, u, eig.eigenvalues(k), residual};
    }
  }
  return best;
}

}  // namespace latids
