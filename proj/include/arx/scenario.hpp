#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arx/synth.hpp"

namespace arx {

/// Synthetic bench definition read from a key = value file.
///
/// system = foster: a Foster network driven by piecewise power profiles,
/// with white measurement noise on the temperature.
/// system = arx: an exact ARX process (input "P", output "T") with
/// equation-error noise; inputs are profiles or seeded white noise.
struct Scenario {
  enum class System { foster, arx };

  struct InputPlan {
    std::vector<PowerSegment> segments;  // used when random_length == 0
    std::size_t random_length = 0;
    double random_std = 1.0;
  };

  System system = System::foster;
  double dt = 0.1;
  FosterNetwork foster{{{0.8, 2.0}, {0.4, 30.0}}, 25.0};
  std::vector<double> arx_a;
  std::vector<double> arx_b;
  int arx_nk = 1;
  InputPlan train_input;
  InputPlan validate_input;
  double noise_std = 0.0;       // absolute
  double noise_fraction = 0.0;  // of the clean output standard deviation
  std::uint64_t seed = 42;

  /// Bench defaults: dt 0.1 s, stages (0.8 K/W, 2 s) and (0.4 K/W, 30 s),
  /// 25 degC ambient, step-and-cool training, staircase validation.
  static Scenario default_bench();

  /// Throws Error(config) with the offending key on invalid values.
  void validate() const;
  std::string serialize() const;
  static Scenario parse(const std::string& text);
  static Scenario load(const std::filesystem::path& path);
};

struct GeneratedData {
  IdentDataset train;
  IdentDataset validate;
};

/// Deterministic for a fixed scenario (including its seed).
GeneratedData generate(const Scenario& scenario);

/// Independent 64-bit seed for a named sub-stream of a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream);

}  // namespace arx
