#include "arx/signals.hpp"

#include <cmath>
#include <numeric>

#include "arx/error.hpp"

namespace arx {

Signal::Signal(std::vector<double> samples, double dt) : samples_(std::move(samples)), dt_(dt) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw Error(ErrorKind::parameter, "sampling step must be positive and finite");
  }
  if (samples_.empty()) throw Error(ErrorKind::data, "signal must hold at least one sample");
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    if (!std::isfinite(samples_[k])) {
      throw Error(ErrorKind::data, "non-finite sample at index " + std::to_string(k), k);
    }
  }
}

std::string to_string(AmbientMode mode) {
  switch (mode) {
    case AmbientMode::explicit_scalar: return "explicit-scalar";
    case AmbientMode::mean_of_first_m: return "mean-of-first-m";
    case AmbientMode::per_sample_column: return "per-sample-column";
  }
  return "?";
}

AmbientMode ambient_mode_from_string(const std::string& text) {
  if (text == "explicit-scalar") return AmbientMode::explicit_scalar;
  if (text == "mean-of-first-m") return AmbientMode::mean_of_first_m;
  if (text == "per-sample-column") return AmbientMode::per_sample_column;
  throw Error(ErrorKind::format, "unknown ambient mode '" + text + "'");
}

IdentDataset::IdentDataset(std::vector<NamedSignal> inputs, NamedSignal output, Ambient ambient,
                           std::string label)
    : inputs_(std::move(inputs)),
      output_(std::move(output)),
      ambient_(std::move(ambient)),
      label_(std::move(label)) {
  if (inputs_.empty()) throw Error(ErrorKind::shape, "dataset needs at least one input");
  const auto n = output_.signal.size();
  const auto dt = output_.signal.dt();
  auto check = [&](const Signal& s, const std::string& name) {
    if (s.size() != n) {
      throw Error(ErrorKind::shape, "signal '" + name + "' has " + std::to_string(s.size()) +
                                        " samples, output has " + std::to_string(n));
    }
    if (s.dt() != dt) throw Error(ErrorKind::shape, "signal '" + name + "' has a different dt");
  };
  for (const auto& in : inputs_) check(in.signal, in.name);
  if (const auto* trace = std::get_if<Signal>(&ambient_)) check(*trace, "ambient");
  if (const auto* scalar = std::get_if<double>(&ambient_); scalar && !std::isfinite(*scalar)) {
    throw Error(ErrorKind::data, "ambient reference must be finite");
  }
}

IdentDataset IdentDataset::with_output(Signal output) const {
  IdentDataset copy(inputs_, NamedSignal{output_.name, std::move(output)}, ambient_, label_);
  copy.preprocessing_ = preprocessing_;
  return copy;
}

IdentDataset IdentDataset::with_label(std::string label) const {
  IdentDataset copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

IdentDataset IdentDataset::with_preprocessing(std::optional<Preprocessing> p) const {
  IdentDataset copy = *this;
  copy.preprocessing_ = std::move(p);
  return copy;
}

namespace {

const Signal& ambient_trace(const Ambient& ambient) {
  const auto* trace = std::get_if<Signal>(&ambient);
  if (!trace) {
    throw Error(ErrorKind::parameter, "per-sample ambient mode needs an ambient column");
  }
  return *trace;
}

}  // namespace

IdentDataset apply_preprocessing(const IdentDataset& dataset, const Preprocessing& resolved) {
  const auto& y = dataset.output().signal;
  std::vector<double> rise(y.size());
  if (resolved.mode == AmbientMode::per_sample_column) {
    const auto& amb = ambient_trace(dataset.ambient());
    for (std::size_t k = 0; k < y.size(); ++k) rise[k] = y[k] - amb[k];
  } else {
    for (std::size_t k = 0; k < y.size(); ++k) rise[k] = y[k] - resolved.offset;
  }
  return dataset.with_output(Signal(std::move(rise), y.dt())).with_preprocessing(resolved);
}

PreprocessResult preprocess(const IdentDataset& dataset, const Preprocessing& request) {
  Preprocessing resolved = request;
  const auto& y = dataset.output().signal;
  switch (request.mode) {
    case AmbientMode::explicit_scalar:
      if (!std::isfinite(request.offset)) {
        throw Error(ErrorKind::parameter, "ambient scalar must be finite");
      }
      break;
    case AmbientMode::mean_of_first_m: {
      if (request.m == 0 || request.m > y.size()) {
        throw Error(ErrorKind::parameter, "ambient window m=" + std::to_string(request.m) +
                                              " must be in [1, " + std::to_string(y.size()) + "]");
      }
      const auto s = y.samples().first(request.m);
      resolved.offset = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(request.m);
      break;
    }
    case AmbientMode::per_sample_column: {
      const auto& amb = ambient_trace(dataset.ambient());
      const auto s = amb.samples();
      resolved.offset = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
      break;
    }
  }
  return {apply_preprocessing(dataset, resolved), resolved};
}

Signal restore_ambient(const Signal& rise, const Preprocessing& resolved, const Ambient& ambient) {
  std::vector<double> out(rise.size());
  if (resolved.mode == AmbientMode::per_sample_column) {
    const auto& amb = ambient_trace(ambient);
    if (amb.size() != rise.size()) throw Error(ErrorKind::shape, "ambient trace length mismatch");
    for (std::size_t k = 0; k < rise.size(); ++k) out[k] = rise[k] + amb[k];
  } else {
    for (std::size_t k = 0; k < rise.size(); ++k) out[k] = rise[k] + resolved.offset;
  }
  return Signal(std::move(out), rise.dt());
}

}  // namespace arx
