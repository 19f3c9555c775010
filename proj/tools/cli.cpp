#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "arx/csv.hpp"
#include "arx/keyvalue.hpp"
#include "arx/model.hpp"
#include "arx/scenario.hpp"
#include "arx/selection.hpp"
#include "arx/signals.hpp"

namespace arx::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::config:
    case ErrorKind::format:
    case ErrorKind::version:
      return exit_usage;
    case ErrorKind::schema:
    case ErrorKind::parse:
    case ErrorKind::data:
    case ErrorKind::size:
    case ErrorKind::shape:
    case ErrorKind::degenerate:
      return exit_data;
    case ErrorKind::rank:
    case ErrorKind::divergence:
    case ErrorKind::selection:
      return exit_numerical;
  }
  return exit_usage;
}

namespace {

namespace fs = std::filesystem;

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += sep;
    s += items[i];
  }
  return s;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<int>(parse_integer(item, flag)));
    } catch (const Error&) {
      throw Error(ErrorKind::parameter, flag + ": '" + text + "' is not a comma-separated list");
    }
  }
  return out;
}

// Ambient flags shared by fit.
struct AmbientOptions {
  std::optional<double> scalar;
  std::string column;
  std::size_t mean_first = Preprocessing::default_m;

  Preprocessing request() const {
    if (!column.empty()) {
      auto p = Preprocessing::per_sample();
      p.ambient_column = column;
      return p;
    }
    if (scalar) return Preprocessing::scalar(*scalar);
    return Preprocessing::mean_of_first(mean_first);
  }
};

Schema schema_for(const std::vector<std::string>& inputs, const std::string& output,
                  const std::string& time, const std::string& ambient_column) {
  Schema s;
  s.inputs = inputs;
  s.output = output;
  if (!time.empty()) s.time = time;
  if (!ambient_column.empty()) s.ambient_column = ambient_column;
  return s;
}

void put_report(KeyValueWriter& w, const std::string& prefix, const FitReport& r) {
  w.put(prefix + ".prediction_mode", to_string(r.prediction_mode));
  w.put(prefix + ".fit_percent", r.fit_percent);
  w.put(prefix + ".rmse", r.rmse);
  w.put(prefix + ".aic", r.aic);
  w.put(prefix + ".samples", r.samples);
  w.put(prefix + ".orders", r.orders.to_string());
  w.put(prefix + ".threshold", r.threshold);
  w.put(prefix + ".rank_used", r.rank_used);
  w.put(prefix + ".spectral_radius", r.stability.spectral_radius);
  w.put(prefix + ".stable", r.stability.stable);
}

// t, [measured], predicted, [residual]
void write_prediction(const fs::path& path, const Signal& predicted,
                      const std::optional<Signal>& measured) {
  std::vector<double> t(predicted.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k) * predicted.dt();
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{std::move(t)};
  if (measured) {
    header.push_back("measured");
    cols.push_back(measured->values());
  }
  header.push_back("predicted");
  cols.push_back(predicted.values());
  if (measured) {
    std::vector<double> residual(predicted.size());
    for (std::size_t k = 0; k < residual.size(); ++k) residual[k] = (*measured)[k] - predicted[k];
    header.push_back("residual");
    cols.push_back(std::move(residual));
  }
  write_csv(path, header, cols);
}

// ---------------------------------------------------------------- gen

struct GenConfig {
  std::string scenario;
  std::optional<long long> seed;
  std::optional<double> noise_std;
  std::optional<double> noise_fraction;
  std::string out_dir = ".";
};

int cmd_gen(const GenConfig& cfg, std::ostream& out) {
  Scenario s = cfg.scenario.empty() ? Scenario::default_bench() : Scenario::load(cfg.scenario);
  if (cfg.seed) {
    if (*cfg.seed < 0) throw Error(ErrorKind::config, "seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(*cfg.seed);
  }
  if (cfg.noise_std) s.noise_std = *cfg.noise_std;
  if (cfg.noise_fraction) s.noise_fraction = *cfg.noise_fraction;
  s.validate();

  const auto data = generate(s);
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  save_dataset(dir / "train.csv", data.train);
  save_dataset(dir / "validate.csv", data.validate);
  out << "wrote " << (dir / "train.csv").string() << " (" << data.train.size() << " samples)\n";
  out << "wrote " << (dir / "validate.csv").string() << " (" << data.validate.size()
      << " samples)\n";
  const std::string text = "# resolved scenario\n" + s.serialize();
  std::ofstream(dir / "scenario.txt", std::ios::binary) << text;
  out << "wrote " << (dir / "scenario.txt").string() << "\n";
  if (s.system == Scenario::System::foster) {
    out << "ambient " << short_number(s.foster.ambient) << " degC; fit with --ambient "
        << format_double(s.foster.ambient) << "\n";
  }
  return exit_ok;
}

// ---------------------------------------------------------------- fit

struct FitConfig {
  std::string train;
  std::string validate;
  std::vector<std::string> inputs{"P"};
  std::string output = "T";
  std::string time;
  double dt = 0.0;
  AmbientOptions ambient;
  int na_max = 4;
  int nb_max = 4;
  int nk_max = 3;
  std::string criterion = "aic";
  std::size_t threshold_count = default_threshold_count;
  bool no_truncation = false;
  bool per_input_orders = false;
  std::optional<int> na;
  std::string nb;
  std::string nk;
  bool serial = false;
  std::string out_dir = ".";
};

int cmd_fit(const FitConfig& cfg, std::ostream& out) {
  SearchSpace space;
  space.na_max = cfg.na_max;
  space.nb_max = cfg.nb_max;
  space.nk_max = cfg.nk_max;
  space.threshold_count = cfg.threshold_count;
  space.truncation = !cfg.no_truncation;
  space.shared_orders_across_inputs = !cfg.per_input_orders;
  space.validate();
  const Criterion criterion = criterion_from_string(cfg.criterion);

  std::optional<ArxOrders> fixed;
  if (cfg.na || !cfg.nb.empty() || !cfg.nk.empty()) {
    if (!cfg.na || cfg.nb.empty() || cfg.nk.empty()) {
      throw Error(ErrorKind::parameter, "fixed orders need --na, --nb and --nk together");
    }
    const auto nb = parse_int_list(cfg.nb, "--nb");
    const auto nk = parse_int_list(cfg.nk, "--nk");
    if (nb.size() != cfg.inputs.size() || nk.size() != cfg.inputs.size()) {
      throw Error(ErrorKind::parameter, "--nb and --nk need one value per input");
    }
    ArxOrders o{*cfg.na, {}};
    for (std::size_t j = 0; j < nb.size(); ++j) o.inputs.push_back({nb[j], nk[j]});
    o.validate();
    fixed = o;
  }

  const Preprocessing request = cfg.ambient.request();
  const Schema schema = schema_for(cfg.inputs, cfg.output, cfg.time, cfg.ambient.column);
  const IdentDataset raw_train = load_dataset(cfg.train, schema, cfg.dt);
  const IdentDataset raw_val = load_dataset(cfg.validate, schema, cfg.dt);
  const auto [train, resolved] = preprocess(raw_train, request);
  const IdentDataset val = apply_preprocessing(raw_val, resolved);

  const Execution exec = cfg.serial ? Execution::serial : Execution::parallel;
  const GridSearchResult result =
      fixed ? grid_search(train, val, std::span<const ArxOrders>(&*fixed, 1), space, criterion, exec)
            : grid_search(train, val, space, criterion, exec);
  const FitReport one_step = evaluate_model(result.model, train, PredictionMode::one_step,
                                            result.train.threshold, result.train.rank_used);

  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  save_model(dir / "model.arx", result.model);
  write_candidate_table(dir / "candidates.csv", result.candidates);
  write_prediction(dir / "train_prediction.csv", simulate_free_run(result.model, train),
                   train.output().signal);
  write_prediction(dir / "validate_prediction.csv", simulate_free_run(result.model, val),
                   val.output().signal);

  KeyValueWriter w;
  w.comment("ARX fit report");
  w.put("format", "arx-fit-report");
  w.put("format_version", 1);
  w.put("config.train", cfg.train);
  w.put("config.validate", cfg.validate);
  w.put("config.inputs", join(cfg.inputs));
  w.put("config.output", cfg.output);
  w.put("config.time", cfg.time);
  w.put("config.dt", cfg.dt);
  w.put("config.ambient_mode", to_string(request.mode));
  w.put("config.ambient_scalar", request.mode == AmbientMode::explicit_scalar ? request.offset
                                                                             : 0.0);
  w.put("config.ambient_m", request.m);
  w.put("config.ambient_column", request.ambient_column);
  w.put("config.na_max", space.na_max);
  w.put("config.nb_max", space.nb_max);
  w.put("config.nk_max", space.nk_max);
  w.put("config.fixed_orders", fixed ? fixed->to_string() : std::string("none"));
  w.put("config.criterion", to_string(criterion));
  w.put("config.threshold_count", space.threshold_count);
  w.put("config.truncation", space.truncation);
  w.put("config.shared_orders_across_inputs", space.shared_orders_across_inputs);
  w.put("preprocessing.offset", resolved.offset);
  w.put("candidates", result.candidates.size());
  w.put("winner_index", result.winner);
  put_report(w, "train", result.train);
  put_report(w, "train_one_step", one_step);
  put_report(w, "validation", result.validation);
  w.write_file(dir / "fit_report.txt");

  const auto& tr = result.train;
  const auto& va = result.validation;
  out << "selected " << tr.orders.to_string() << " theta=" << short_number(tr.threshold)
      << " rank=" << tr.rank_used << " spectral radius=" << short_number(tr.stability.spectral_radius)
      << "\n";
  out << "train fit " << short_number(tr.fit_percent) << "% (free-run), "
      << short_number(one_step.fit_percent) << "% (one-step), rmse " << short_number(tr.rmse)
      << "\n";
  out << "validation fit " << short_number(va.fit_percent) << "% (free-run), rmse "
      << short_number(va.rmse) << "\n";
  out << "wrote model.arx, candidates.csv, fit_report.txt, train_prediction.csv, "
         "validate_prediction.csv to "
      << dir.string() << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------- simulate / validate

struct ModelDataConfig {
  std::string model;
  std::string data;
  std::string time;
  std::string output;  // defaults to the model's output name
  bool add_ambient = false;
  std::string out_path;
  double min_fit = 0.0;
  std::string report;
};

// Loads the model's inputs, and the measured output when present.
struct LoadedRun {
  IdentDataset raw;
  bool has_measured;
};

LoadedRun load_for_model(const ArxModel& model, const ModelDataConfig& cfg, bool need_output) {
  const CsvTable table = read_csv(cfg.data);
  const std::string output = cfg.output.empty() ? model.output_name() : cfg.output;
  const bool has_measured = table.find(output).has_value();
  if (need_output && !has_measured) {
    throw Error(ErrorKind::schema, "output column " + output + " not found");
  }
  for (const auto& name : model.input_names()) {
    if (!table.find(name)) {
      throw Error(ErrorKind::shape, "input column " + name + " required by the model not found");
    }
  }
  const auto& pre = model.preprocessing();
  std::string ambient_column;
  if (pre.mode == AmbientMode::per_sample_column) ambient_column = pre.ambient_column;
  Schema schema = schema_for(model.input_names(), has_measured ? output : model.input_names()[0],
                             cfg.time, ambient_column);
  return {load_dataset(cfg.data, schema, model.dt()), has_measured};
}

int cmd_simulate(const ModelDataConfig& cfg, std::ostream& out) {
  const ArxModel model = load_model(cfg.model);
  const auto [raw, has_measured] = load_for_model(model, cfg, false);
  const IdentDataset rise = apply_preprocessing(raw, model.preprocessing());
  Signal predicted = simulate_free_run(model, rise);
  std::optional<Signal> measured;
  if (cfg.add_ambient) {
    predicted = restore_ambient(predicted, model.preprocessing(), raw.ambient());
    if (has_measured) measured = raw.output().signal;
  } else if (has_measured) {
    measured = rise.output().signal;
  }
  const fs::path path = cfg.out_path.empty() ? fs::path("prediction.csv") : fs::path(cfg.out_path);
  write_prediction(path, predicted, measured);
  out << "wrote " << path.string() << " (" << predicted.size() << " samples, "
      << (cfg.add_ambient ? "absolute" : "rise above ambient") << ")\n";
  if (measured) {
    out << "fit " << short_number(fit_metric(*measured, predicted)) << "% (free-run)\n";
  }
  return exit_ok;
}

int cmd_validate(const ModelDataConfig& cfg, std::ostream& out) {
  const ArxModel model = load_model(cfg.model);
  const IdentDataset raw = load_for_model(model, cfg, true).raw;
  const IdentDataset rise = apply_preprocessing(raw, model.preprocessing());
  const FitReport r = validate_model(model, rise);
  const bool pass = r.fit_percent >= cfg.min_fit;

  if (!cfg.report.empty()) {
    KeyValueWriter w;
    w.comment("ARX validation report");
    w.put("format", "arx-validation-report");
    w.put("format_version", 1);
    w.put("config.model", cfg.model);
    w.put("config.data", cfg.data);
    w.put("config.time", cfg.time);
    w.put("config.min_fit", cfg.min_fit);
    put_report(w, "validation", r);
    w.put("pass", pass);
    w.write_file(cfg.report);
  }
  out << "validation fit " << short_number(r.fit_percent) << "% (free-run), rmse "
      << short_number(r.rmse) << ", spectral radius " << short_number(r.stability.spectral_radius)
      << "\n";
  out << (pass ? "PASS" : "FAIL") << ": fit " << (pass ? ">=" : "<") << " "
      << short_number(cfg.min_fit) << "%\n";
  return pass ? exit_ok : exit_threshold_fail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ARX thermal identification: generate, fit, simulate, validate"};
  app.require_subcommand(1);

  GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write training/validation CSVs from a synthetic scenario");
  gen_cmd->add_option("--scenario", gen.scenario, "Scenario file (default: built-in bench)");
  gen_cmd->add_option("--seed", gen.seed, "Override the scenario seed");
  gen_cmd->add_option("--noise-std", gen.noise_std, "Absolute output noise std");
  gen_cmd->add_option("--noise-fraction", gen.noise_fraction, "Noise std as a fraction of output std");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory");

  FitConfig fit;
  auto* fit_cmd = app.add_subcommand("fit", "Grid-search ARX orders and SVD thresholds");
  fit_cmd->add_option("--train", fit.train, "Training CSV")->required();
  fit_cmd->add_option("--validate", fit.validate, "Validation CSV")->required();
  fit_cmd->add_option("--input", fit.inputs, "Input column(s)")->delimiter(',');
  fit_cmd->add_option("--output", fit.output, "Output (temperature) column");
  fit_cmd->add_option("--time", fit.time, "Time column, checked for uniform spacing");
  fit_cmd->add_option("--dt", fit.dt, "Sampling step [s]")->required();
  auto* amb_scalar = fit_cmd->add_option("--ambient", fit.ambient.scalar, "Ambient scalar");
  auto* amb_col = fit_cmd->add_option("--ambient-column", fit.ambient.column, "Ambient column");
  fit_cmd->add_option("--ambient-mean-first", fit.ambient.mean_first,
                      "Ambient = mean of the first m output samples (default mode)");
  amb_scalar->excludes(amb_col);
  fit_cmd->add_option("--na-max", fit.na_max, "Largest na");
  fit_cmd->add_option("--nb-max", fit.nb_max, "Largest nb");
  fit_cmd->add_option("--nk-max", fit.nk_max, "Largest nk");
  fit_cmd->add_option("--criterion", fit.criterion, "fit or aic")->check(CLI::IsMember({"fit", "aic"}));
  fit_cmd->add_option("--threshold-count", fit.threshold_count, "SVD threshold grid size");
  fit_cmd->add_flag("--no-truncation", fit.no_truncation, "Only try theta = 0");
  fit_cmd->add_flag("--per-input-orders", fit.per_input_orders,
                    "Search (nb, nk) independently per input");
  fit_cmd->add_option("--na", fit.na, "Fixed na (with --nb/--nk)");
  fit_cmd->add_option("--nb", fit.nb, "Fixed nb per input, comma separated");
  fit_cmd->add_option("--nk", fit.nk, "Fixed nk per input, comma separated");
  fit_cmd->add_flag("--serial", fit.serial, "Use the serial reference search");
  fit_cmd->add_option("--out-dir", fit.out_dir, "Output directory");

  ModelDataConfig sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Free-run prediction from a model and input CSV");
  sim_cmd->add_option("--model", sim.model, "Model file")->required();
  sim_cmd->add_option("--input", sim.data, "Input CSV")->required();
  sim_cmd->add_option("--time", sim.time, "Time column");
  sim_cmd->add_option("--output", sim.output, "Measured output column (default: model's)");
  sim_cmd->add_flag("--add-ambient", sim.add_ambient, "Re-add the stored ambient");
  sim_cmd->add_option("--out", sim.out_path, "Prediction CSV (default prediction.csv)");

  ModelDataConfig val;
  auto* val_cmd = app.add_subcommand("validate", "Free-run fit of a model on a dataset");
  val_cmd->add_option("--model", val.model, "Model file")->required();
  val_cmd->add_option("--data", val.data, "Dataset CSV")->required();
  val_cmd->add_option("--time", val.time, "Time column");
  val_cmd->add_option("--output", val.output, "Output column (default: model's)");
  val_cmd->add_option("--min-fit", val.min_fit, "Exit 1 when fit is below this percentage");
  val_cmd->add_option("--report", val.report, "Write a machine-readable report");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*val_cmd) return cmd_validate(val, out);
  } catch (const Error& e) {
    err << "arx: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "arx: " << e.what() << "\n";
    return exit_data;
  }
  return exit_usage;
}

}  // namespace arx::cli
