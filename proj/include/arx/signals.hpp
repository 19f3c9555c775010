#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace arx {

/// Uniformly sampled real time series. Samples are finite, dt > 0.
class Signal {
 public:
  /// Throws Error(data) on non-finite samples or an empty sequence and
  /// Error(parameter) on a non-positive or non-finite step.
  Signal(std::vector<double> samples, double dt);

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t k) const { return samples_[k]; }

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::vector<double> samples_;
  double dt_;
};

struct NamedSignal {
  std::string name;
  Signal signal;

  friend bool operator==(const NamedSignal&, const NamedSignal&) = default;
};

/// No ambient, a scalar reference temperature, or a per-sample trace.
using Ambient = std::variant<std::monostate, double, Signal>;

enum class AmbientMode { explicit_scalar, mean_of_first_m, per_sample_column };

std::string to_string(AmbientMode mode);
AmbientMode ambient_mode_from_string(const std::string& text);

/// How the output was turned into a rise above ambient.
///
/// As a request, `offset` is the scalar for explicit_scalar and `m` the
/// window for mean_of_first_m. Once resolved, `offset` holds the value that
/// was subtracted (for per_sample_column, the mean of the trace, kept for
/// information only; the trace itself is subtracted sample by sample).
struct Preprocessing {
  static constexpr std::size_t default_m = 10;

  AmbientMode mode = AmbientMode::mean_of_first_m;
  double offset = 0.0;
  std::size_t m = default_m;
  std::string ambient_column;  // per_sample_column only; informational

  static Preprocessing scalar(double ambient) {
    return {AmbientMode::explicit_scalar, ambient, default_m, {}};
  }
  static Preprocessing mean_of_first(std::size_t m) {
    return {AmbientMode::mean_of_first_m, 0.0, m, {}};
  }
  static Preprocessing per_sample() { return {AmbientMode::per_sample_column, 0.0, default_m, {}}; }

  friend bool operator==(const Preprocessing&, const Preprocessing&) = default;
};

/// Aligned inputs, output and ambient reference. All signals share length
/// and dt; at least one input is present.
class IdentDataset {
 public:
  IdentDataset(std::vector<NamedSignal> inputs, NamedSignal output, Ambient ambient = {},
               std::string label = {});

  const std::vector<NamedSignal>& inputs() const noexcept { return inputs_; }
  const NamedSignal& output() const noexcept { return output_; }
  const Ambient& ambient() const noexcept { return ambient_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return output_.signal.size(); }
  double dt() const noexcept { return output_.signal.dt(); }
  std::size_t input_count() const noexcept { return inputs_.size(); }

  /// Set once the output has been converted to a rise above ambient.
  const std::optional<Preprocessing>& preprocessing() const noexcept { return preprocessing_; }

  IdentDataset with_output(Signal output) const;
  IdentDataset with_label(std::string label) const;
  IdentDataset with_preprocessing(std::optional<Preprocessing> p) const;

  friend bool operator==(const IdentDataset&, const IdentDataset&) = default;

 private:
  std::vector<NamedSignal> inputs_;
  NamedSignal output_;
  Ambient ambient_;
  std::string label_;
  std::optional<Preprocessing> preprocessing_;
};

struct PreprocessResult {
  IdentDataset dataset;
  Preprocessing resolved;
};

/// Resolves the ambient reference and subtracts it from the output.
/// Inputs are left untouched. Throws Error(parameter) when m is 0 or
/// exceeds N, or per-sample mode is requested without an ambient trace.
PreprocessResult preprocess(const IdentDataset& dataset, const Preprocessing& request);

/// Applies an already-resolved preprocessing (e.g. training offset applied
/// to validation data). per_sample_column uses the dataset's own trace.
IdentDataset apply_preprocessing(const IdentDataset& dataset, const Preprocessing& resolved);

/// Inverse of preprocessing: adds the ambient back onto a rise signal.
/// `ambient` is only consulted in per_sample_column mode.
Signal restore_ambient(const Signal& rise, const Preprocessing& resolved,
                       const Ambient& ambient = {});

/// Column-role mapping for CSV ingestion.
struct Schema {
  std::optional<std::string> time;
  std::vector<std::string> inputs;
  std::string output;
  std::optional<std::string> ambient_column;
  std::optional<double> ambient_scalar;
};

/// Relative tolerance on the spacing of the optional time column.
inline constexpr double time_uniformity_tolerance = 1e-6;

IdentDataset load_dataset(const std::filesystem::path& path, const Schema& schema, double dt);

/// Writes `t,<inputs...>,<output>[,<ambient>]` with t = k*dt and 17
/// significant digits. A scalar ambient is not written.
void save_dataset(const std::filesystem::path& path, const IdentDataset& dataset,
                  const std::string& ambient_name = "T_amb");

}  // namespace arx
