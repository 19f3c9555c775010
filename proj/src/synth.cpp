#include "arx/synth.hpp"

#include <cmath>
#include <numbers>

#include "arx/error.hpp"
#include "arx/keyvalue.hpp"

namespace arx {

double GaussianNoise::uniform_open() {
  // 53 random bits mapped to the open interval (0, 1).
  const auto bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double GaussianNoise::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<double> GaussianNoise::samples(std::size_t n, double stddev) {
  std::vector<double> out(n);
  for (auto& x : out) x = stddev * next();
  return out;
}

void FosterNetwork::validate() const {
  if (stages.empty()) throw Error(ErrorKind::config, "Foster network needs at least one stage");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    if (!(s.r > 0.0) || !(s.tau > 0.0) || !std::isfinite(s.r) || !std::isfinite(s.tau)) {
      throw Error(ErrorKind::config,
                  "Foster stage " + std::to_string(i) + " needs positive finite R and tau");
    }
  }
  if (!std::isfinite(ambient)) throw Error(ErrorKind::config, "ambient must be finite");
}

double FosterNetwork::steady_state_gain() const {
  double g = 0.0;
  for (const auto& s : stages) g += s.r;
  return g;
}

Signal build_profile(const PowerProfile& profile) {
  if (!(profile.dt > 0.0)) throw Error(ErrorKind::parameter, "profile dt must be positive");
  std::vector<double> samples;
  for (const auto& seg : profile.segments) {
    const double steps = seg.duration / profile.dt;
    const double whole = std::round(steps);
    if (!(seg.duration > 0.0) || std::abs(steps - whole) > 1e-9 * std::max(1.0, whole)) {
      throw Error(ErrorKind::parameter, "segment duration " + format_double(seg.duration) +
                                            " s is not a positive multiple of dt " +
                                            format_double(profile.dt));
    }
    samples.insert(samples.end(), static_cast<std::size_t>(whole), seg.level);
  }
  return Signal(std::move(samples), profile.dt);
}

IdentDataset simulate_foster(const FosterNetwork& network, const Signal& power) {
  network.validate();
  const double dt = power.dt();
  const std::size_t n_stages = network.stages.size();
  std::vector<double> pole(n_stages), gain(n_stages), state(n_stages, 0.0);
  for (std::size_t i = 0; i < n_stages; ++i) {
    pole[i] = std::exp(-dt / network.stages[i].tau);
    gain[i] = network.stages[i].r * (1.0 - pole[i]);
  }
  std::vector<double> temperature(power.size());
  for (std::size_t k = 0; k < power.size(); ++k) {
    double rise = 0.0;
    for (double x : state) rise += x;
    temperature[k] = network.ambient + rise;
    for (std::size_t i = 0; i < n_stages; ++i) state[i] = pole[i] * state[i] + gain[i] * power[k];
  }
  return IdentDataset({{"P", power}}, {"T", Signal(std::move(temperature), dt)}, network.ambient,
                      "foster");
}

IdentDataset generate_arx(const ArxModel& model, std::span<const Signal> inputs, double noise_std,
                          std::uint64_t seed) {
  if (!(noise_std >= 0.0)) throw Error(ErrorKind::parameter, "noise_std must be >= 0");
  if (inputs.size() != model.inputs().size()) {
    throw Error(ErrorKind::shape, "model expects " + std::to_string(model.inputs().size()) +
                                      " inputs, got " + std::to_string(inputs.size()));
  }
  const std::size_t n = inputs[0].size();
  GaussianNoise noise(seed);
  const auto e = noise.samples(n, noise_std);
  const auto& a = model.a();
  const std::size_t na = a.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      const auto& term = model.inputs()[j];
      for (std::size_t i = 1; i <= term.b.size(); ++i) {
        const long long idx = static_cast<long long>(k) - static_cast<long long>(i) - term.nk + 1;
        if (idx >= 0) s += term.b[i - 1] * inputs[j][static_cast<std::size_t>(idx)];
      }
    }
    for (std::size_t i = 1; i <= na && i <= k; ++i) s -= a[i - 1] * y[k - i];
    y[k] = s + e[k];
  }
  std::vector<NamedSignal> named;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    named.push_back({model.inputs()[j].name, inputs[j]});
  }
  return IdentDataset(std::move(named), {model.output_name(), Signal(std::move(y), inputs[0].dt())},
                      0.0,
                      "arx seed=" + std::to_string(seed) + " rng=" + noise_algorithm);
}

IdentDataset generate_arx(const ArxModel& model, const Signal& input, double noise_std,
                          std::uint64_t seed) {
  return generate_arx(model, std::span<const Signal>(&input, 1), noise_std, seed);
}

IdentDataset add_measurement_noise(const IdentDataset& dataset, double noise_std,
                                   std::uint64_t seed) {
  if (!(noise_std >= 0.0)) throw Error(ErrorKind::parameter, "noise_std must be >= 0");
  const auto& y = dataset.output().signal;
  GaussianNoise noise(seed);
  std::vector<double> noisy(y.values());
  for (auto& v : noisy) v += noise_std * noise.next();
  return dataset.with_output(Signal(std::move(noisy), y.dt()))
      .with_label(dataset.label() + " noise=" + format_double(noise_std) +
                  " seed=" + std::to_string(seed) + " rng=" + noise_algorithm);
}

double standard_deviation(const Signal& s) {
  double mean = 0.0;
  for (double v : s.samples()) mean += v;
  mean /= static_cast<double>(s.size());
  double ss = 0.0;
  for (double v : s.samples()) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(s.size()));
}

}  // namespace arx
