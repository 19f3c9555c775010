#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "arx/model.hpp"
#include "arx/signals.hpp"

namespace arx {

/// Identifier stored next to every seed so generated data can be reproduced.
inline constexpr const char* noise_algorithm = "mt19937_64/box-muller";

/// Seeded standard-normal source. std::normal_distribution is
/// implementation-defined, so the transform is done here to keep generated
/// datasets identical across standard libraries.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}

  double next();
  std::vector<double> samples(std::size_t n, double stddev);

 private:
  double uniform_open();  // (0, 1)

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// One parallel R-C stage: resistance R [K/W], time constant tau [s].
struct FosterStage {
  double r = 0.0;
  double tau = 0.0;
};

struct FosterNetwork {
  std::vector<FosterStage> stages;
  double ambient = 25.0;

  /// Throws Error(config) on zero stages or non-positive R/tau.
  void validate() const;
  double steady_state_gain() const;
};

/// Piecewise-constant power profile: (duration [s], level [W]) segments.
struct PowerSegment {
  double duration = 0.0;
  double level = 0.0;
};

struct PowerProfile {
  std::vector<PowerSegment> segments;
  double dt = 0.1;
};

/// Throws Error(parameter) when a duration is not a positive multiple of dt.
Signal build_profile(const PowerProfile& profile);

/// Exact zero-order-hold response of a Foster network to a power signal,
/// starting at ambient. Dataset: input "P", output "T", scalar ambient.
IdentDataset simulate_foster(const FosterNetwork& network, const Signal& power);

/// Output of the ARX recursion driven by `inputs` with equation-error
/// white noise e[k] ~ N(0, noise_std^2). noise_std = 0 reproduces
/// simulate_free_run exactly. Dataset ambient is the scalar 0.
IdentDataset generate_arx(const ArxModel& model, std::span<const Signal> inputs, double noise_std,
                          std::uint64_t seed);
IdentDataset generate_arx(const ArxModel& model, const Signal& input, double noise_std,
                          std::uint64_t seed);

/// Adds white measurement noise of the given standard deviation to the
/// output of a dataset.
IdentDataset add_measurement_noise(const IdentDataset& dataset, double noise_std,
                                   std::uint64_t seed);

/// Population standard deviation of a signal.
double standard_deviation(const Signal& s);

}  // namespace arx
