#include "arx/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "arx/error.hpp"

namespace arx {

ArxModel::ArxModel(std::vector<double> a, std::vector<InputTerm> inputs, double dt,
                   Preprocessing preprocessing, std::string output_name)
    : a_(std::move(a)),
      inputs_(std::move(inputs)),
      dt_(dt),
      preprocessing_(std::move(preprocessing)),
      output_name_(std::move(output_name)) {
  if (a_.empty()) throw Error(ErrorKind::parameter, "model needs na >= 1");
  if (inputs_.empty()) throw Error(ErrorKind::parameter, "model needs at least one input");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw Error(ErrorKind::parameter, "model dt must be positive and finite");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(a_)) throw Error(ErrorKind::parameter, "non-finite a coefficient");
  for (const auto& in : inputs_) {
    if (in.b.empty()) throw Error(ErrorKind::parameter, "input '" + in.name + "' needs nb >= 1");
    if (in.nk < 0) throw Error(ErrorKind::parameter, "input '" + in.name + "' has nk < 0");
    if (!finite(in.b)) {
      throw Error(ErrorKind::parameter, "non-finite b coefficient for '" + in.name + "'");
    }
  }
}

ArxModel ArxModel::from_solution(const ArxOrders& orders, const Eigen::VectorXd& omega,
                                 std::vector<std::string> input_names, double dt,
                                 Preprocessing preprocessing, std::string output_name) {
  orders.validate();
  if (static_cast<std::size_t>(omega.size()) != orders.parameter_count()) {
    throw Error(ErrorKind::shape, "coefficient vector length does not match orders");
  }
  if (input_names.size() != orders.inputs.size()) {
    throw Error(ErrorKind::shape, "input name count does not match orders");
  }
  Eigen::Index pos = 0;
  std::vector<double> a(static_cast<std::size_t>(orders.na));
  for (auto& ai : a) ai = -omega(pos++);
  std::vector<InputTerm> inputs;
  for (std::size_t j = 0; j < orders.inputs.size(); ++j) {
    InputTerm term{std::move(input_names[j]), {}, orders.inputs[j].nk};
    term.b.resize(static_cast<std::size_t>(orders.inputs[j].nb));
    for (auto& bi : term.b) bi = omega(pos++);
    inputs.push_back(std::move(term));
  }
  return ArxModel(std::move(a), std::move(inputs), dt, std::move(preprocessing),
                  std::move(output_name));
}

std::vector<std::string> ArxModel::input_names() const {
  std::vector<std::string> names;
  for (const auto& in : inputs_) names.push_back(in.name);
  return names;
}

ArxOrders ArxModel::orders() const {
  ArxOrders o;
  o.na = na();
  for (const auto& in : inputs_) o.inputs.push_back({static_cast<int>(in.b.size()), in.nk});
  return o;
}

Eigen::VectorXd ArxModel::omega() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(orders().parameter_count()));
  Eigen::Index pos = 0;
  for (double ai : a_) w(pos++) = -ai;
  for (const auto& in : inputs_) {
    for (double bi : in.b) w(pos++) = bi;
  }
  return w;
}

ArxModel ArxModel::with_preprocessing(Preprocessing p) const {
  ArxModel copy = *this;
  copy.preprocessing_ = std::move(p);
  return copy;
}

StabilityVerdict check_stability(const ArxModel& model) {
  const auto& a = model.a();
  const auto n = static_cast<Eigen::Index>(a.size());
  // Trailing zero coefficients contribute roots at the origin.
  Eigen::Index degree = n;
  while (degree > 0 && a[static_cast<std::size_t>(degree - 1)] == 0.0) --degree;
  if (degree == 0) return {true, 0.0};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (Eigen::Index i = 0; i < degree; ++i) companion(0, i) = -a[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const Eigen::VectorXcd roots = solver.eigenvalues();

  // Newton polish on p(z) = z^d + a_1 z^(d-1) + ... + a_d.
  auto eval = [&](std::complex<double> z) {
    std::complex<double> p = 1.0, dp = 0.0;
    for (Eigen::Index i = 0; i < degree; ++i) {
      dp = dp * z + p;
      p = p * z + a[static_cast<std::size_t>(i)];
    }
    return std::pair{p, dp};
  };
  double radius = 0.0;
  for (Eigen::Index r = 0; r < roots.size(); ++r) {
    std::complex<double> z = roots(r);
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = eval(z);
      if (std::abs(dp) == 0.0) break;
      const std::complex<double> next = z - p / dp;
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
      if (std::abs(eval(next).first) >= std::abs(p)) break;
      z = next;
    }
    radius = std::max(radius, std::abs(z));
  }
  return {radius < 1.0, radius};
}

namespace {

void check_inputs(const ArxModel& model, std::span<const Signal> inputs) {
  if (inputs.size() != model.inputs().size()) {
    throw Error(ErrorKind::shape, "model expects " + std::to_string(model.inputs().size()) +
                                      " inputs, got " + std::to_string(inputs.size()));
  }
  for (std::size_t j = 1; j < inputs.size(); ++j) {
    if (inputs[j].size() != inputs[0].size()) {
      throw Error(ErrorKind::shape, "input signals have different lengths");
    }
  }
}

std::vector<Signal> input_signals(const IdentDataset& dataset) {
  std::vector<Signal> out;
  out.reserve(dataset.input_count());
  for (const auto& in : dataset.inputs()) out.push_back(in.signal);
  return out;
}

// Exogenous contribution at sample k; inputs before index 0 are zero.
double exogenous(const ArxModel& model, std::span<const Signal> inputs, std::size_t k) {
  double s = 0.0;
  const auto kk = static_cast<long long>(k);
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    const auto& term = model.inputs()[j];
    const auto u = inputs[j].samples();
    for (std::size_t i = 1; i <= term.b.size(); ++i) {
      const long long idx = kk - static_cast<long long>(i) - term.nk + 1;
      if (idx < 0) break;
      s += term.b[i - 1] * u[static_cast<std::size_t>(idx)];
    }
  }
  return s;
}

}  // namespace

Signal predict_one_step(const ArxModel& model, const IdentDataset& dataset, OutputUnits units) {
  const auto inputs = input_signals(dataset);
  check_inputs(model, inputs);
  const auto y = dataset.output().signal.samples();
  const std::size_t k0 = model.orders().first_usable_sample();
  if (y.size() <= k0) {
    throw Error(ErrorKind::size, "one-step prediction needs more than " + std::to_string(k0) +
                                     " samples");
  }
  std::vector<double> out(y.begin(), y.end());
  const auto& a = model.a();
  for (std::size_t k = k0; k < y.size(); ++k) {
    double s = exogenous(model, inputs, k);
    for (std::size_t i = 1; i <= a.size(); ++i) s -= a[i - 1] * y[k - i];
    out[k] = s;
  }
  Signal rise(std::move(out), dataset.dt());
  if (units == OutputUnits::absolute) {
    return restore_ambient(rise, model.preprocessing(), dataset.ambient());
  }
  return rise;
}

Signal simulate_free_run(const ArxModel& model, std::span<const Signal> inputs,
                         std::span<const double> initial_outputs) {
  check_inputs(model, inputs);
  const auto& a = model.a();
  if (!initial_outputs.empty() && initial_outputs.size() != a.size()) {
    throw Error(ErrorKind::shape, "expected " + std::to_string(a.size()) + " seed values, got " +
                                      std::to_string(initial_outputs.size()));
  }
  const std::size_t n = inputs[0].size();
  const std::size_t na = a.size();
  // history[0..na) holds y[-na..-1], followed by the simulated samples.
  std::vector<double> history(na + n, 0.0);
  for (std::size_t i = 0; i < initial_outputs.size(); ++i) history[na - 1 - i] = initial_outputs[i];

  for (std::size_t k = 0; k < n; ++k) {
    double s = exogenous(model, inputs, k);
    const double* past = history.data() + na + k;
    for (std::size_t i = 1; i <= na; ++i) s -= a[i - 1] * past[-static_cast<std::ptrdiff_t>(i)];
    if (!std::isfinite(s)) {
      throw Error(ErrorKind::divergence,
                  "free-run simulation diverged at sample " + std::to_string(k), k);
    }
    history[na + k] = s;
  }
  history.erase(history.begin(), history.begin() + static_cast<std::ptrdiff_t>(na));
  return Signal(std::move(history), inputs[0].dt());
}

Signal simulate_free_run(const ArxModel& model, const IdentDataset& dataset,
                         std::span<const double> initial_outputs) {
  const auto inputs = input_signals(dataset);
  return simulate_free_run(model, inputs, initial_outputs);
}

}  // namespace arx
