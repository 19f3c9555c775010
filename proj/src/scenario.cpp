#include "arx/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "arx/error.hpp"
#include "arx/keyvalue.hpp"

namespace arx {

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Scenario Scenario::default_bench() {
  Scenario s;
  s.train_input.segments = {{10.0, 0.0}, {200.0, 100.0}, {250.0, 0.0}};
  s.validate_input.segments = {{10.0, 0.0},  {60.0, 20.0}, {60.0, 60.0}, {60.0, 100.0},
                         {60.0, 40.0}, {60.0, 80.0}, {80.0, 0.0}};
  return s;
}

void Scenario::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::config, "dt must be positive");
  if (!(noise_std >= 0.0)) throw Error(ErrorKind::config, "noise_std must be >= 0");
  if (!(noise_fraction >= 0.0)) throw Error(ErrorKind::config, "noise_fraction must be >= 0");
  if (noise_std > 0.0 && noise_fraction > 0.0) {
    throw Error(ErrorKind::config, "set either noise_std or noise_fraction, not both");
  }
  if (system == System::foster) {
    foster.validate();
  } else {
    if (arx_a.empty() || arx_b.empty()) {
      throw Error(ErrorKind::config, "arx scenario needs arx.a and arx.b");
    }
    if (arx_nk < 0) throw Error(ErrorKind::config, "arx.nk must be >= 0");
  }
  for (const auto* plan : {&train_input, &validate_input}) {
    if (plan->random_length == 0 && plan->segments.empty()) {
      throw Error(ErrorKind::config, "each dataset needs segments or a random input length");
    }
    if (plan->random_length > 0 && !(plan->random_std > 0.0)) {
      throw Error(ErrorKind::config, "random input std must be positive");
    }
  }
}

namespace {

std::string segments_to_string(const std::vector<PowerSegment>& segs) {
  std::string s;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i) s += ' ';
    s += format_double(segs[i].duration) + ':' + format_double(segs[i].level);
  }
  return s;
}

std::vector<PowerSegment> parse_segments(const std::string& text, const std::string& key) {
  std::vector<PowerSegment> segs;
  std::istringstream ss(text);
  std::string token;
  while (ss >> token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::config, key + ": segment '" + token + "' is not duration:level");
    }
    segs.push_back({parse_double(token.substr(0, colon), key),
                    parse_double(token.substr(colon + 1), key)});
  }
  return segs;
}

void put_plan(KeyValueWriter& w, const std::string& prefix, const Scenario::InputPlan& plan) {
  if (plan.random_length > 0) {
    w.put(prefix + ".random_length", plan.random_length);
    w.put(prefix + ".random_std", plan.random_std);
  } else {
    w.put(prefix + ".segments", segments_to_string(plan.segments));
  }
}

Scenario::InputPlan get_plan(const KeyValueDocument& doc, const std::string& prefix) {
  Scenario::InputPlan plan;
  if (doc.contains(prefix + ".random_length")) {
    const auto n = doc.get_integer(prefix + ".random_length");
    if (n < 1) throw Error(ErrorKind::config, prefix + ".random_length must be >= 1");
    plan.random_length = static_cast<std::size_t>(n);
    plan.random_std = doc.contains(prefix + ".random_std")
                          ? doc.get_double(prefix + ".random_std")
                          : 1.0;
  } else {
    plan.segments = parse_segments(doc.get(prefix + ".segments"), prefix + ".segments");
  }
  return plan;
}

}  // namespace

std::string Scenario::serialize() const {
  KeyValueWriter w;
  w.put("format", "arx-scenario");
  w.put("format_version", 1);
  w.put("system", system == System::foster ? "foster" : "arx");
  w.put("dt", dt);
  if (system == System::foster) {
    w.put("ambient", foster.ambient);
    w.put("stages", foster.stages.size());
    for (std::size_t i = 0; i < foster.stages.size(); ++i) {
      w.put("stage." + std::to_string(i) + ".r", foster.stages[i].r);
      w.put("stage." + std::to_string(i) + ".tau", foster.stages[i].tau);
    }
  } else {
    w.put("arx.a", arx_a);
    w.put("arx.b", arx_b);
    w.put("arx.nk", arx_nk);
  }
  put_plan(w, "train", train_input);
  put_plan(w, "validate", validate_input);
  w.put("noise_std", noise_std);
  w.put("noise_fraction", noise_fraction);
  w.put("seed", std::to_string(seed));
  w.put("rng", noise_algorithm);
  return w.str();
}

Scenario Scenario::parse(const std::string& text) {
  try {
    const auto doc = KeyValueDocument::parse(text, "scenario");
    if (doc.contains("format_version") && doc.get_integer("format_version") != 1) {
      throw Error(ErrorKind::config, "unsupported scenario format_version");
    }
    Scenario s;
    const auto system = doc.get_or("system", "foster");
    if (system == "foster") {
      s.system = System::foster;
    } else if (system == "arx") {
      s.system = System::arx;
    } else {
      throw Error(ErrorKind::config, "system must be 'foster' or 'arx'");
    }
    s.dt = doc.get_double("dt");
    if (s.system == System::foster) {
      s.foster.ambient = doc.contains("ambient") ? doc.get_double("ambient") : 25.0;
      const auto n = doc.get_integer("stages");
      if (n < 0) throw Error(ErrorKind::config, "stages must be >= 0");
      s.foster.stages.clear();
      for (long long i = 0; i < n; ++i) {
        const auto p = "stage." + std::to_string(i) + ".";
        s.foster.stages.push_back({doc.get_double(p + "r"), doc.get_double(p + "tau")});
      }
    } else {
      s.arx_a = doc.get_doubles("arx.a");
      s.arx_b = doc.get_doubles("arx.b");
      s.arx_nk = static_cast<int>(doc.get_integer("arx.nk"));
    }
    s.train_input = get_plan(doc, "train");
    s.validate_input = get_plan(doc, "validate");
    if (doc.contains("noise_std")) s.noise_std = doc.get_double("noise_std");
    if (doc.contains("noise_fraction")) s.noise_fraction = doc.get_double("noise_fraction");
    if (doc.contains("seed")) {
      const auto seed = doc.get_integer("seed");
      if (seed < 0) throw Error(ErrorKind::config, "seed must be >= 0");
      s.seed = static_cast<std::uint64_t>(seed);
    }
    s.validate();
    return s;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    throw Error(ErrorKind::config, e.what());
  }
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open scenario '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text);
}

namespace {

Signal make_input(const Scenario::InputPlan& plan, double dt, std::uint64_t seed) {
  if (plan.random_length > 0) {
    GaussianNoise g(seed);
    return Signal(g.samples(plan.random_length, plan.random_std), dt);
  }
  return build_profile({plan.segments, dt});
}

IdentDataset make_dataset(const Scenario& s, const Scenario::InputPlan& plan,
                          std::uint32_t stream, const std::string& label) {
  const Signal input = make_input(plan, s.dt, derive_seed(s.seed, stream));
  const std::uint64_t noise_seed = derive_seed(s.seed, stream + 100);
  if (s.system == Scenario::System::foster) {
    const IdentDataset clean = simulate_foster(s.foster, input);
    double sigma = s.noise_std;
    if (s.noise_fraction > 0.0) sigma = s.noise_fraction * standard_deviation(clean.output().signal);
    const IdentDataset out = sigma > 0.0 ? add_measurement_noise(clean, sigma, noise_seed) : clean;
    return out.with_label(label + " " + out.label());
  }
  const ArxModel model(s.arx_a, {{"P", s.arx_b, s.arx_nk}}, s.dt, Preprocessing::scalar(0.0), "T");
  double sigma = s.noise_std;
  if (s.noise_fraction > 0.0) {
    sigma = s.noise_fraction * standard_deviation(generate_arx(model, input, 0.0, 0).output().signal);
  }
  const IdentDataset out = generate_arx(model, input, sigma, noise_seed);
  return out.with_label(label + " " + out.label());
}

}  // namespace

GeneratedData generate(const Scenario& scenario) {
  scenario.validate();
  return {make_dataset(scenario, scenario.train_input, 1, "training"),
          make_dataset(scenario, scenario.validate_input, 2, "validation")};
}

}  // namespace arx
