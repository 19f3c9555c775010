#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arx/regression.hpp"
#include "arx/signals.hpp"

namespace arx {

/// Exogenous part of one input: name, b_1..b_nb and delay nk.
struct InputTerm {
  std::string name;
  std::vector<double> b;
  int nk = 0;

  friend bool operator==(const InputTerm&, const InputTerm&) = default;
};

/// Identified ARX model
///
///   y[k] = -sum_i a_i y[k-i] + sum_j sum_i b_{j,i} u_j[k-i-nk_j+1]
///
/// held in rise-above-ambient units, together with the preprocessing needed
/// to map predictions back to absolute temperature.
class ArxModel {
 public:
  /// Throws Error(parameter) on empty or non-finite coefficient arrays,
  /// negative delays or a non-positive dt.
  ArxModel(std::vector<double> a, std::vector<InputTerm> inputs, double dt,
           Preprocessing preprocessing = Preprocessing::scalar(0.0),
           std::string output_name = "y");

  /// Builds a model from a solved unknown vector laid out as in
  /// RegressionProblem: (-a block, b blocks). Signs are resolved here.
  static ArxModel from_solution(const ArxOrders& orders, const Eigen::VectorXd& omega,
                                std::vector<std::string> input_names, double dt,
                                Preprocessing preprocessing = Preprocessing::scalar(0.0),
                                std::string output_name = "y");

  const std::vector<double>& a() const noexcept { return a_; }
  const std::vector<InputTerm>& inputs() const noexcept { return inputs_; }
  const std::vector<double>& b(std::size_t input) const { return inputs_.at(input).b; }
  int na() const noexcept { return static_cast<int>(a_.size()); }
  double dt() const noexcept { return dt_; }
  const Preprocessing& preprocessing() const noexcept { return preprocessing_; }
  const std::string& output_name() const noexcept { return output_name_; }
  std::vector<std::string> input_names() const;

  ArxOrders orders() const;

  /// Unknown vector in regression column order (-a block, then b blocks).
  Eigen::VectorXd omega() const;

  ArxModel with_preprocessing(Preprocessing p) const;

  friend bool operator==(const ArxModel&, const ArxModel&) = default;

 private:
  std::vector<double> a_;
  std::vector<InputTerm> inputs_;
  double dt_;
  Preprocessing preprocessing_;
  std::string output_name_;
};

struct StabilityVerdict {
  bool stable = false;
  double spectral_radius = 0.0;
};

/// Largest root magnitude of z^na + a_1 z^(na-1) + ... + a_na; stable iff < 1.
StabilityVerdict check_stability(const ArxModel& model);

enum class OutputUnits { rise, absolute };

/// Prediction from measured past outputs and inputs (e[k] = 0). Samples
/// before k0 are copied from the measurement. `absolute` re-adds the
/// ambient through the model's preprocessing and the dataset's ambient.
/// Throws Error(shape) when the dataset's input count differs.
Signal predict_one_step(const ArxModel& model, const IdentDataset& dataset,
                        OutputUnits units = OutputUnits::rise);

/// Recursive prediction from the model's own past outputs. Inputs before
/// index 0 are taken as zero; `initial_outputs[i-1]` seeds y[-i] (empty
/// means all zeros, i.e. starting at ambient). Throws Error(divergence)
/// with the sample index when a value leaves the finite range.
Signal simulate_free_run(const ArxModel& model, std::span<const Signal> inputs,
                         std::span<const double> initial_outputs = {});

/// Dataset convenience overload.
Signal simulate_free_run(const ArxModel& model, const IdentDataset& dataset,
                         std::span<const double> initial_outputs = {});

inline constexpr int model_format_version = 1;

void save_model(const std::filesystem::path& path, const ArxModel& model);
std::string serialize_model(const ArxModel& model);

/// Throws Error(version) on an unknown format_version and Error(format) on
/// malformed or truncated files.
ArxModel load_model(const std::filesystem::path& path);
ArxModel parse_model(const std::string& text);

}  // namespace arx
