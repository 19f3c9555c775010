#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arx/model.hpp"
#include "arx/regression.hpp"
#include "arx/signals.hpp"

namespace arx {

enum class Criterion { fit, aic };
enum class PredictionMode { one_step, free_run };
enum class Execution { serial, parallel };

std::string to_string(Criterion c);
std::string to_string(PredictionMode m);
Criterion criterion_from_string(const std::string& text);

/// Order grid na in [1, na_max], nb in [1, nb_max], nk in [0, nk_max].
struct SearchSpace {
  int na_max = 4;
  int nb_max = 4;
  int nk_max = 3;
  std::size_t threshold_count = default_threshold_count;
  /// When false only theta = 0 is tried (plain pseudoinverse).
  bool truncation = true;
  /// Same (nb, nk) for every input; otherwise the full per-input product.
  bool shared_orders_across_inputs = true;

  /// Throws Error(parameter) on na_max/nb_max < 1, nk_max < 0 or a zero
  /// threshold count.
  void validate() const;

  /// Candidate orders in iteration order: na outer, then nb, then nk
  /// (per input, first input outermost).
  std::vector<ArxOrders> enumerate(std::size_t input_count) const;
};

struct FitReport {
  double fit_percent = 0.0;
  double rmse = 0.0;
  double aic = 0.0;
  std::size_t samples = 0;
  ArxOrders orders;
  double threshold = 0.0;
  std::size_t rank_used = 0;
  PredictionMode prediction_mode = PredictionMode::free_run;
  StabilityVerdict stability;
};

/// One evaluated (orders, best threshold) pair of the grid search.
struct Candidate {
  ArxOrders orders;
  bool solved = false;  // false when no threshold gave a usable solution
  std::string note;     // reason when unsolved
  double threshold = 0.0;
  std::size_t rank = 0;
  double train_fit = 0.0;
  double train_sse = 0.0;
  double val_fit = 0.0;  // NaN when the validation run diverged
  double aic = 0.0;
  StabilityVerdict stability;
  Eigen::VectorXd omega;
};

struct GridSearchResult {
  ArxModel model;
  FitReport train;
  FitReport validation;
  std::vector<Candidate> candidates;
  std::size_t winner = 0;
};

/// 100 * (1 - ||y - yhat|| / ||y - mean(y)||). Throws Error(shape) on
/// length mismatch or fewer than 2 samples, Error(degenerate) when the
/// measured signal is constant.
double fit_metric(std::span<const double> measured, std::span<const double> predicted);
double fit_metric(const Signal& measured, const Signal& predicted);

double sum_squared_error(std::span<const double> measured, std::span<const double> predicted);

/// N ln(SSE/N) + 2k, with SSE floored at machine epsilon * N.
double aic(double sse, std::size_t n_samples, std::size_t n_params);

/// Fit, RMSE and AIC of a model's prediction against the dataset output
/// (rise units). Threshold and rank are carried into the report as given.
FitReport evaluate_model(const ArxModel& model, const IdentDataset& dataset, PredictionMode mode,
                         double threshold = 0.0, std::size_t rank_used = 0);

/// Free-run evaluation on held-out data.
FitReport validate_model(const ArxModel& model, const IdentDataset& dataset);

/// Threshold search for one order triple: every theta of the grid is
/// truncated, solved and scored by training free-run fit; stable solutions
/// win over unstable ones, then higher fit, first-best kept.
Candidate evaluate_candidate(const IdentDataset& train, const IdentDataset& validate,
                             const ArxOrders& orders, const SearchSpace& space);

/// Evaluates every candidate and picks the stable winner by the training
/// criterion. Both datasets must share the same preprocessing. The
/// candidate table is ordered by enumeration index whatever the execution
/// policy. Throws Error(selection) when no candidate is stable.
GridSearchResult grid_search(const IdentDataset& train, const IdentDataset& validate,
                             const SearchSpace& space, Criterion criterion = Criterion::aic,
                             Execution execution = Execution::parallel);

/// Same, over an explicit list of orders (e.g. one user-fixed triple).
GridSearchResult grid_search(const IdentDataset& train, const IdentDataset& validate,
                             std::span<const ArxOrders> orders, const SearchSpace& space,
                             Criterion criterion = Criterion::aic,
                             Execution execution = Execution::parallel);

/// CSV with columns na,nb,nk,theta,rank,train_fit,val_fit,aic,
/// spectral_radius,stable. Multi-input nb/nk are joined with ';'.
std::string candidate_table_csv(const std::vector<Candidate>& candidates);
void write_candidate_table(const std::filesystem::path& path,
                           const std::vector<Candidate>& candidates);

}  // namespace arx
