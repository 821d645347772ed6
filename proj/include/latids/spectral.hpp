#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "latids/operator.hpp"

namespace latids {

/// Right-continuous nondecreasing step function vanishing at -infinity:
/// sorted breakpoints with the cumulative value attained at (and after) each.
class CountingFunction {
 public:
  CountingFunction() = default;  // the zero function

  /// From (location, jump size) pairs; equal locations merge, zero-size jumps
  /// are dropped. Jump sizes must be nonnegative.
  static CountingFunction from_jumps(std::vector<std::pair<double, double>> jumps);
  /// Unit jump per eigenvalue; exact duplicates merge into one breakpoint.
  static CountingFunction from_sorted_eigenvalues(std::span<const double> eigs);

  double operator()(double lambda) const;
  double left_limit(double lambda) const;
  double total() const { return values_.empty() ? 0.0 : values_.back(); }
  bool is_zero() const { return breakpoints_.empty(); }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double jump_at(std::size_t i) const { return values_[i] - (i ? values_[i - 1] : 0.0); }

  CountingFunction scaled(double factor) const;
  /// sum_i weight_i * f_i with nonnegative weights.
  static CountingFunction weighted_sum(
      std::span<const std::pair<double, const CountingFunction*>> terms);

  /// CSV rows "breakpoint,cumulative_value", 17 significant digits.
  void write_csv(std::ostream& out) const;

  bool operator==(const CountingFunction& o) const = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Exact supremum of |f - g|: scanned over the merged breakpoints and their
/// left limits, where a difference of step functions attains its sup.
double sup_distance(const CountingFunction& f, const CountingFunction& g);

struct Jump {
  double location;
  double size;
};

/// Breakpoints with jump >= threshold. merge_tol > 0 first clusters
/// breakpoints closer than merge_tol and reports each cluster's total mass at
/// its largest contributor.
std::vector<Jump> jumps(const CountingFunction& f, double threshold, double merge_tol = 0.0);

struct EigenResult {
  Eigen::VectorXd eigenvalues;  // ascending, with multiplicity
  std::optional<Eigen::MatrixXd> eigenvectors;
  /// max_i ||A v_i - lambda_i v_i|| / max(1, ||A||); only measured when
  /// vectors are requested, else -1.
  double residual = -1.0;
};

/// Full spectrum of a real symmetric matrix.
EigenResult sym_eigen(const Eigen::MatrixXd& a, bool want_vectors);

/// n(A): unit mass per eigenvalue at or below lambda.
CountingFunction counting_function(std::span<const double> sorted_eigenvalues);
CountingFunction counting_function(const Eigen::VectorXd& sorted_eigenvalues);

/// n of the principal submatrix on the given coordinate axes.
CountingFunction restriction_counting(const Eigen::MatrixXd& a,
                                      std::span<const Eigen::Index> axes);

struct CompactEigenfunction {
  std::vector<Point> sites;  // sites of the assembled region, in matrix order
  Eigen::VectorXd u;         // supported on the interior core, unit norm
  double eigenvalue_used;    // the eigenvalue of the candidate eigenpair
  double residual;           // ||(p_Q H i_Q - lambda) u||
};

/// Searches for an approximate eigenfunction of H at lambda supported in the
/// interior core of Q: diagonalises the restriction to Q, truncates candidate
/// eigenvectors (|mu - lambda| <= eps) to the core, renormalises, and returns
/// the best candidate whose residual stays below eps. Support in the core
/// makes the residual equal to the full-space residual of H.
std::optional<CompactEigenfunction> find_compact_eigenfunction(const OperatorSpec& spec,
                                                               const Colouring& lambda_col,
                                                               double lambda, const Region& q,
                                                               double eps);

}  // namespace latids
