#include "arx/selection.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <optional>

#include "arx/error.hpp"
#include "arx/keyvalue.hpp"

namespace arx {

std::string to_string(Criterion c) { return c == Criterion::fit ? "fit" : "aic"; }

std::string to_string(PredictionMode m) {
  return m == PredictionMode::free_run ? "free-run" : "one-step";
}

Criterion criterion_from_string(const std::string& text) {
  if (text == "fit") return Criterion::fit;
  if (text == "aic") return Criterion::aic;
  throw Error(ErrorKind::parameter, "criterion must be 'fit' or 'aic', got '" + text + "'");
}

void SearchSpace::validate() const {
  if (na_max < 1) throw Error(ErrorKind::parameter, "Na must be >= 1");
  if (nb_max < 1) throw Error(ErrorKind::parameter, "Nb must be >= 1");
  if (nk_max < 0) throw Error(ErrorKind::parameter, "Nk must be >= 0");
  if (threshold_count < 1) throw Error(ErrorKind::parameter, "threshold count must be >= 1");
}

std::vector<ArxOrders> SearchSpace::enumerate(std::size_t input_count) const {
  validate();
  if (input_count == 0) throw Error(ErrorKind::parameter, "search needs at least one input");
  std::vector<InputOrder> per_input;
  for (int nb = 1; nb <= nb_max; ++nb) {
    for (int nk = 0; nk <= nk_max; ++nk) per_input.push_back({nb, nk});
  }
  std::vector<ArxOrders> out;
  for (int na = 1; na <= na_max; ++na) {
    if (shared_orders_across_inputs) {
      for (const auto& io : per_input) out.push_back({na, std::vector<InputOrder>(input_count, io)});
      continue;
    }
    // Odometer over the per-input choices, first input most significant.
    std::vector<std::size_t> digit(input_count, 0);
    while (true) {
      ArxOrders o{na, {}};
      for (auto d : digit) o.inputs.push_back(per_input[d]);
      out.push_back(std::move(o));
      std::size_t pos = input_count;
      while (pos > 0 && ++digit[pos - 1] == per_input.size()) digit[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return out;
}

double sum_squared_error(std::span<const double> measured, std::span<const double> predicted) {
  if (measured.size() != predicted.size()) {
    throw Error(ErrorKind::shape, "measured and predicted lengths differ");
  }
  double sse = 0.0;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    const double e = measured[k] - predicted[k];
    sse += e * e;
  }
  return sse;
}

double fit_metric(std::span<const double> measured, std::span<const double> predicted) {
  if (measured.size() != predicted.size()) {
    throw Error(ErrorKind::shape, "measured and predicted lengths differ");
  }
  if (measured.size() < 2) throw Error(ErrorKind::shape, "fit needs at least 2 samples");
  double mean = 0.0;
  for (double y : measured) mean += y;
  mean /= static_cast<double>(measured.size());
  double spread = 0.0;
  for (double y : measured) spread += (y - mean) * (y - mean);
  if (spread == 0.0) throw Error(ErrorKind::degenerate, "measured signal is constant");
  return 100.0 * (1.0 - std::sqrt(sum_squared_error(measured, predicted)) / std::sqrt(spread));
}

double fit_metric(const Signal& measured, const Signal& predicted) {
  return fit_metric(measured.samples(), predicted.samples());
}

double aic(double sse, std::size_t n_samples, std::size_t n_params) {
  const double n = static_cast<double>(n_samples);
  const double floor = std::numeric_limits<double>::epsilon() * n;
  return n * std::log(std::max(sse, floor) / n) + 2.0 * static_cast<double>(n_params);
}

FitReport evaluate_model(const ArxModel& model, const IdentDataset& dataset, PredictionMode mode,
                         double threshold, std::size_t rank_used) {
  const Signal predicted = mode == PredictionMode::free_run ? simulate_free_run(model, dataset)
                                                            : predict_one_step(model, dataset);
  const auto measured = dataset.output().signal.samples();
  FitReport r;
  r.samples = measured.size();
  const double sse = sum_squared_error(measured, predicted.samples());
  r.fit_percent = fit_metric(measured, predicted.samples());
  r.rmse = std::sqrt(sse / static_cast<double>(r.samples));
  r.orders = model.orders();
  r.aic = aic(sse, r.samples, r.orders.parameter_count());
  r.threshold = threshold;
  r.rank_used = rank_used;
  r.prediction_mode = mode;
  r.stability = check_stability(model);
  return r;
}

FitReport validate_model(const ArxModel& model, const IdentDataset& dataset) {
  return evaluate_model(model, dataset, PredictionMode::free_run);
}

namespace {

Preprocessing model_preprocessing(const IdentDataset& train) {
  return train.preprocessing().value_or(Preprocessing::scalar(0.0));
}

bool same_preprocessing(const std::optional<Preprocessing>& a,
                        const std::optional<Preprocessing>& b) {
  const auto pa = a.value_or(Preprocessing::scalar(0.0));
  const auto pb = b.value_or(Preprocessing::scalar(0.0));
  if (pa.mode != pb.mode) return false;
  // A per-sample ambient is each dataset's own trace.
  if (pa.mode == AmbientMode::per_sample_column) return true;
  return pa.offset == pb.offset;
}

ArxModel candidate_model(const IdentDataset& train, const ArxOrders& orders,
                         const Eigen::VectorXd& omega) {
  std::vector<std::string> names;
  for (const auto& in : train.inputs()) names.push_back(in.name);
  return ArxModel::from_solution(orders, omega, std::move(names), train.dt(),
                                 model_preprocessing(train), train.output().name);
}

}  // namespace

Candidate evaluate_candidate(const IdentDataset& train, const IdentDataset& validate,
                             const ArxOrders& orders, const SearchSpace& space) {
  Candidate c;
  c.orders = orders;
  c.val_fit = std::numeric_limits<double>::quiet_NaN();

  RegressionProblem problem;
  try {
    problem = build_regression(train, orders);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::size) throw;
    c.note = e.what();
    return c;
  }
  const SvdFactors factors = svd(problem.phi);
  if (factors.rank() == 0) {
    c.note = "regressor matrix has rank 0";
    return c;
  }
  const ThresholdGrid grid = space.truncation
                                 ? default_threshold_grid(factors, space.threshold_count)
                                 : ThresholdGrid{{0.0}};

  const auto measured = train.output().signal.samples();
  Eigen::Index previous_rank = -1;
  for (double theta : grid.thresholds) {
    const SvdFactors kept = truncate(factors, theta);
    // Rank is non-increasing in theta; equal rank means an identical solve.
    if (kept.rank() == 0 || kept.rank() == previous_rank) continue;
    previous_rank = kept.rank();

    const Eigen::VectorXd omega = solve_least_squares(problem, kept);
    const ArxModel model = candidate_model(train, orders, omega);
    const StabilityVerdict stability = check_stability(model);
    double fit = -std::numeric_limits<double>::infinity();
    double sse = std::numeric_limits<double>::infinity();
    try {
      const Signal sim = simulate_free_run(model, train);
      sse = sum_squared_error(measured, sim.samples());
      fit = fit_metric(measured, sim.samples());
      if (!std::isfinite(fit)) fit = -std::numeric_limits<double>::infinity();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::divergence) throw;
    }

    const bool better = !c.solved || (stability.stable && !c.stability.stable) ||
                        (stability.stable == c.stability.stable && fit > c.train_fit);
    if (better) {
      c.solved = true;
      c.threshold = theta;
      c.rank = static_cast<std::size_t>(kept.rank());
      c.train_fit = fit;
      c.train_sse = sse;
      c.stability = stability;
      c.omega = omega;
    }
  }
  if (!c.solved) {
    c.note = "every threshold truncated to rank 0";
    return c;
  }
  c.aic = aic(c.train_sse, measured.size(), orders.parameter_count());
  try {
    const ArxModel model = candidate_model(train, orders, c.omega);
    const Signal sim = simulate_free_run(model, validate);
    c.val_fit = fit_metric(validate.output().signal.samples(), sim.samples());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::divergence) throw;
  }
  return c;
}

GridSearchResult grid_search(const IdentDataset& train, const IdentDataset& validate,
                             const SearchSpace& space, Criterion criterion, Execution execution) {
  const auto orders = space.enumerate(train.input_count());
  return grid_search(train, validate, orders, space, criterion, execution);
}

GridSearchResult grid_search(const IdentDataset& train, const IdentDataset& validate,
                             std::span<const ArxOrders> orders, const SearchSpace& space,
                             Criterion criterion, Execution execution) {
  space.validate();
  if (orders.empty()) throw Error(ErrorKind::parameter, "search space is empty");
  if (validate.input_count() != train.input_count()) {
    throw Error(ErrorKind::shape, "training and validation datasets have different inputs");
  }
  if (!same_preprocessing(train.preprocessing(), validate.preprocessing())) {
    throw Error(ErrorKind::parameter,
                "training and validation datasets must share the training preprocessing");
  }

  const auto count = static_cast<std::ptrdiff_t>(orders.size());
  std::vector<Candidate> candidates(orders.size());
  std::vector<std::exception_ptr> failures(orders.size());

  if (execution == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      candidates[i] = evaluate_candidate(train, validate, orders[i], space);
    }
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        candidates[i] = evaluate_candidate(train, validate, orders[i], space);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  std::optional<std::size_t> winner;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!c.solved || !c.stability.stable || !std::isfinite(c.train_fit)) continue;
    if (!winner) {
      winner = i;
      continue;
    }
    const auto& best = candidates[*winner];
    const bool better = criterion == Criterion::fit ? c.train_fit > best.train_fit
                                                    : c.aic < best.aic;
    if (better) winner = i;
  }
  if (!winner) {
    throw Error(ErrorKind::selection,
                "all " + std::to_string(candidates.size()) +
                    " candidates are unstable or unsolvable; widen the search space "
                    "(larger Na/Nb/Nk) or check the data");
  }

  const Candidate& best = candidates[*winner];
  ArxModel model = candidate_model(train, best.orders, best.omega);
  FitReport train_report =
      evaluate_model(model, train, PredictionMode::free_run, best.threshold, best.rank);
  FitReport val_report =
      evaluate_model(model, validate, PredictionMode::free_run, best.threshold, best.rank);
  return GridSearchResult{std::move(model), std::move(train_report), std::move(val_report),
                          std::move(candidates), *winner};
}

namespace {

std::string join_orders(const ArxOrders& o, bool delay) {
  std::string s;
  for (std::size_t j = 0; j < o.inputs.size(); ++j) {
    if (j) s += ';';
    s += std::to_string(delay ? o.inputs[j].nk : o.inputs[j].nb);
  }
  return s;
}

}  // namespace

std::string candidate_table_csv(const std::vector<Candidate>& candidates) {
  std::string out = "na,nb,nk,theta,rank,train_fit,val_fit,aic,spectral_radius,stable\n";
  for (const auto& c : candidates) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out += std::to_string(c.orders.na) + ',' + join_orders(c.orders, false) + ',' +
           join_orders(c.orders, true) + ',';
    out += format_double(c.solved ? c.threshold : nan) + ',' + std::to_string(c.rank) + ',';
    out += format_double(c.solved ? c.train_fit : nan) + ',' + format_double(c.val_fit) + ',';
    out += format_double(c.solved ? c.aic : nan) + ',';
    out += format_double(c.solved ? c.stability.spectral_radius : nan) + ',';
    out += (c.solved && c.stability.stable) ? "true" : "false";
    out += '\n';
  }
  return out;
}

void write_candidate_table(const std::filesystem::path& path,
                           const std::vector<Candidate>& candidates) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot open '" + path.string() + "' for writing");
  out << candidate_table_csv(candidates);
}

}  // namespace arx
