#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arx/signals.hpp"

namespace arx {

/// Exogenous order and pure delay of one input.
struct InputOrder {
  int nb = 1;  // >= 1
  int nk = 0;  // >= 0

  friend bool operator==(const InputOrder&, const InputOrder&) = default;
};

struct ArxOrders {
  int na = 1;                     // >= 1
  std::vector<InputOrder> inputs;  // one entry per input

  /// Throws Error(parameter) when an order is out of range.
  void validate() const;

  /// First sample index whose regressor row references no pre-history.
  std::size_t first_usable_sample() const;

  /// na + sum of nb_j.
  std::size_t parameter_count() const;

  std::string to_string() const;

  friend bool operator==(const ArxOrders&, const ArxOrders&) = default;
};

/// Source of one regressor column.
struct RegressorColumn {
  enum class Kind { output_lag, input_lag };
  Kind kind;
  std::size_t input;  // input index, input_lag only
  int lag;            // i in y[k-i] or u_j[k-i-nk_j+1]
};

/// Lagged-output / lagged-input regression T = Phi * Omega + e.
///
/// Row r explains y[k0 + r]. Output-lag column i holds y[k0+r-i]; input j
/// lag i holds u_j[k0+r-i-nk_j+1]. The unknown vector is ordered as the
/// columns: (-a_1 .. -a_na, b_{1,1} .. b_{1,nb_1}, b_{2,1} ..).
struct RegressionProblem {
  Eigen::MatrixXd phi;
  Eigen::VectorXd target;
  std::size_t k0 = 0;
  ArxOrders orders;
  std::vector<RegressorColumn> column_map;
};

/// Throws Error(size) naming the required minimum when N - k0 is smaller
/// than the column count, Error(shape) when the orders do not match the
/// dataset's input count.
RegressionProblem build_regression(const IdentDataset& dataset, const ArxOrders& orders);

/// Thin SVD with numerically-zero singular values removed.
struct SvdFactors {
  Eigen::MatrixXd u;               // rows x rank, orthonormal columns
  Eigen::VectorXd singular_values;  // non-increasing, all > 0
  Eigen::MatrixXd v;               // cols x rank, orthonormal columns

  Eigen::Index rank() const { return singular_values.size(); }
};

/// Singular values below this fraction of sigma_1 are treated as zero.
inline constexpr double svd_rank_tolerance = 1e-14;

/// Throws Error(data) on non-finite entries.
SvdFactors svd(const Eigen::MatrixXd& phi);

/// Drops every singular triplet with sigma_i < threshold. Threshold 0 is
/// the identity; a threshold above sigma_1 leaves rank 0.
SvdFactors truncate(const SvdFactors& factors, double threshold);

/// Minimum-norm least-squares solution V * diag(1/sigma) * U^T * target.
/// Throws Error(rank) on rank-0 factors.
Eigen::VectorXd solve_least_squares(const RegressionProblem& problem, const SvdFactors& factors);
Eigen::VectorXd solve_least_squares(const Eigen::VectorXd& target, const SvdFactors& factors);

/// Ascending set of truncation thresholds; the first entry is always 0.
struct ThresholdGrid {
  std::vector<double> thresholds;
};

inline constexpr std::size_t default_threshold_count = 20;

/// {0} followed by `n` values geometrically spaced over
/// [sigma_r, sigma_1 * (1 + 1e-12)]. Throws Error(parameter) on n = 0 or
/// rank-0 factors.
ThresholdGrid default_threshold_grid(const SvdFactors& factors, std::size_t n);

}  // namespace arx
