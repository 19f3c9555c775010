#include "arx/regression.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "arx/error.hpp"

namespace arx {

void ArxOrders::validate() const {
  if (na < 1) throw Error(ErrorKind::parameter, "na must be >= 1, got " + std::to_string(na));
  if (inputs.empty()) throw Error(ErrorKind::parameter, "orders name no input");
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j].nb < 1) {
      throw Error(ErrorKind::parameter, "nb of input " + std::to_string(j) + " must be >= 1");
    }
    if (inputs[j].nk < 0) {
      throw Error(ErrorKind::parameter, "nk of input " + std::to_string(j) + " must be >= 0");
    }
  }
}

std::size_t ArxOrders::first_usable_sample() const {
  // Oldest input sample of a row at k is u[k - nb - nk + 1].
  int k0 = na;
  for (const auto& in : inputs) k0 = std::max(k0, in.nb + in.nk - 1);
  return static_cast<std::size_t>(k0);
}

std::size_t ArxOrders::parameter_count() const {
  std::size_t k = static_cast<std::size_t>(na);
  for (const auto& in : inputs) k += static_cast<std::size_t>(in.nb);
  return k;
}

std::string ArxOrders::to_string() const {
  std::string s = "na=" + std::to_string(na);
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    s += " nb" + std::to_string(j) + "=" + std::to_string(inputs[j].nb);
    s += " nk" + std::to_string(j) + "=" + std::to_string(inputs[j].nk);
  }
  return s;
}

RegressionProblem build_regression(const IdentDataset& dataset, const ArxOrders& orders) {
  orders.validate();
  if (orders.inputs.size() != dataset.input_count()) {
    throw Error(ErrorKind::shape, "orders describe " + std::to_string(orders.inputs.size()) +
                                      " inputs, dataset has " +
                                      std::to_string(dataset.input_count()));
  }
  const std::size_t n = dataset.size();
  const std::size_t k0 = orders.first_usable_sample();
  const std::size_t cols = orders.parameter_count();
  if (n < k0 + cols) {
    throw Error(ErrorKind::size, "orders " + orders.to_string() + " need at least " +
                                     std::to_string(k0 + cols) + " samples, dataset has " +
                                     std::to_string(n));
  }
  const std::size_t rows = n - k0;

  RegressionProblem problem;
  problem.k0 = k0;
  problem.orders = orders;
  problem.phi.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  problem.target.resize(static_cast<Eigen::Index>(rows));

  for (int i = 1; i <= orders.na; ++i) {
    problem.column_map.push_back({RegressorColumn::Kind::output_lag, 0, i});
  }
  for (std::size_t j = 0; j < orders.inputs.size(); ++j) {
    for (int i = 1; i <= orders.inputs[j].nb; ++i) {
      problem.column_map.push_back({RegressorColumn::Kind::input_lag, j, i});
    }
  }

  const auto y = dataset.output().signal.samples();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t k = k0 + r;
    const auto row = static_cast<Eigen::Index>(r);
    problem.target(row) = y[k];
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& col = problem.column_map[c];
      double value;
      if (col.kind == RegressorColumn::Kind::output_lag) {
        value = y[k - static_cast<std::size_t>(col.lag)];
      } else {
        const auto u = dataset.inputs()[col.input].signal.samples();
        const int nk = orders.inputs[col.input].nk;
        value = u[k + 1 - static_cast<std::size_t>(col.lag + nk)];
      }
      problem.phi(row, static_cast<Eigen::Index>(c)) = value;
    }
  }
  return problem;
}

SvdFactors svd(const Eigen::MatrixXd& phi) {
  if (!phi.allFinite()) throw Error(ErrorKind::data, "matrix holds non-finite entries");
  SvdFactors out;
  if (phi.size() == 0) {
    out.u.resize(phi.rows(), 0);
    out.v.resize(phi.cols(), 0);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd, Eigen::ColPivHouseholderQRPreconditioner> decomposition(
      phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = decomposition.singularValues();
  Eigen::Index rank = 0;
  if (sigma.size() > 0 && sigma(0) > 0.0) {
    const double cutoff = svd_rank_tolerance * sigma(0);
    while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  }
  out.u = decomposition.matrixU().leftCols(rank);
  out.singular_values = sigma.head(rank);
  out.v = decomposition.matrixV().leftCols(rank);
  return out;
}

SvdFactors truncate(const SvdFactors& factors, double threshold) {
  // Sorted non-increasing, so the kept set is a prefix.
  Eigen::Index keep = 0;
  const auto& sigma = factors.singular_values;
  while (keep < sigma.size() && !(sigma(keep) < threshold)) ++keep;
  if (keep == sigma.size()) return factors;
  return SvdFactors{factors.u.leftCols(keep), sigma.head(keep), factors.v.leftCols(keep)};
}

Eigen::VectorXd solve_least_squares(const Eigen::VectorXd& target, const SvdFactors& factors) {
  if (factors.rank() == 0) {
    throw Error(ErrorKind::rank, "cannot solve with rank-0 factors (threshold above sigma_1?)");
  }
  if (factors.u.rows() != target.size()) {
    throw Error(ErrorKind::shape, "target length does not match the factored matrix");
  }
  const Eigen::VectorXd projected =
      (factors.u.transpose() * target).cwiseQuotient(factors.singular_values);
  return factors.v * projected;
}

Eigen::VectorXd solve_least_squares(const RegressionProblem& problem, const SvdFactors& factors) {
  return solve_least_squares(problem.target, factors);
}

ThresholdGrid default_threshold_grid(const SvdFactors& factors, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::parameter, "threshold count must be >= 1");
  if (factors.rank() == 0) throw Error(ErrorKind::parameter, "threshold grid needs rank >= 1");
  const double lo = factors.singular_values(factors.rank() - 1);
  const double hi = factors.singular_values(0) * (1.0 + 1e-12);
  ThresholdGrid grid;
  grid.thresholds.reserve(n + 1);
  grid.thresholds.push_back(0.0);
  if (n == 1) {
    grid.thresholds.push_back(hi);
    return grid;
  }
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    grid.thresholds.push_back(i + 1 == n ? hi : lo * std::exp(ratio * t));
  }
  return grid;
}

}  // namespace arx
