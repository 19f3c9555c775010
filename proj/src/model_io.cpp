#include <fstream>

#include "arx/error.hpp"
#include "arx/keyvalue.hpp"
#include "arx/model.hpp"

namespace arx {
namespace {

constexpr const char* format_tag = "arx-model";

}  // namespace

std::string serialize_model(const ArxModel& model) {
  KeyValueWriter w;
  w.comment("ARX model: y[k] = -sum a_i y[k-i] + sum_j sum_i b_j,i u_j[k-i-nk_j+1]");
  w.put("format", format_tag);
  w.put("format_version", model_format_version);
  w.put("dt", model.dt());
  w.put("output", model.output_name());
  w.put("na", model.na());
  w.put("a", model.a());
  w.put("inputs", model.inputs().size());
  for (std::size_t j = 0; j < model.inputs().size(); ++j) {
    const auto& in = model.inputs()[j];
    const std::string prefix = "input." + std::to_string(j) + ".";
    w.put(prefix + "name", in.name);
    w.put(prefix + "nb", in.b.size());
    w.put(prefix + "nk", in.nk);
    w.put(prefix + "b", in.b);
  }
  const auto& p = model.preprocessing();
  w.put("preprocessing.mode", to_string(p.mode));
  w.put("preprocessing.offset", p.offset);
  w.put("preprocessing.m", p.m);
  w.put("preprocessing.ambient_column", p.ambient_column);
  w.put("end", format_tag);
  return w.str();
}

void save_model(const std::filesystem::path& path, const ArxModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot open '" + path.string() + "' for writing");
  out << serialize_model(model);
  if (!out) throw Error(ErrorKind::config, "failed writing '" + path.string() + "'");
}

ArxModel parse_model(const std::string& text) {
  const auto doc = KeyValueDocument::parse(text, "model file");
  if (doc.get_or("format", "") != format_tag) {
    throw Error(ErrorKind::format, "model file: not an ARX model (format tag missing)");
  }
  const auto version = doc.get_integer("format_version");
  if (version != model_format_version) {
    throw Error(ErrorKind::version, "model file format_version " + std::to_string(version) +
                                        " is not supported (expected " +
                                        std::to_string(model_format_version) + ")");
  }
  if (doc.get_or("end", "") != format_tag) {
    throw Error(ErrorKind::format, "model file is truncated (no end marker)");
  }

  auto a = doc.get_doubles("a");
  if (static_cast<long long>(a.size()) != doc.get_integer("na")) {
    throw Error(ErrorKind::format, "model file: na does not match the a array");
  }
  const auto count = doc.get_integer("inputs");
  if (count < 1) throw Error(ErrorKind::format, "model file: inputs must be >= 1");
  std::vector<InputTerm> inputs;
  for (long long j = 0; j < count; ++j) {
    const std::string prefix = "input." + std::to_string(j) + ".";
    InputTerm term;
    term.name = doc.get(prefix + "name");
    term.nk = static_cast<int>(doc.get_integer(prefix + "nk"));
    term.b = doc.get_doubles(prefix + "b");
    if (static_cast<long long>(term.b.size()) != doc.get_integer(prefix + "nb")) {
      throw Error(ErrorKind::format, "model file: " + prefix + "nb does not match the b array");
    }
    inputs.push_back(std::move(term));
  }

  Preprocessing p;
  p.mode = ambient_mode_from_string(doc.get("preprocessing.mode"));
  p.offset = doc.get_double("preprocessing.offset");
  const auto m = doc.get_integer("preprocessing.m");
  if (m < 1) throw Error(ErrorKind::format, "model file: preprocessing.m must be >= 1");
  p.m = static_cast<std::size_t>(m);
  p.ambient_column = doc.get_or("preprocessing.ambient_column", "");

  try {
    return ArxModel(std::move(a), std::move(inputs), doc.get_double("dt"), std::move(p),
                    doc.get("output"));
  } catch (const Error& e) {
    throw Error(ErrorKind::format, std::string("model file: ") + e.what());
  }
}

ArxModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::format, "cannot open model file '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_model(text);
}

}  // namespace arx
