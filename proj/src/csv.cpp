#include "arx/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "arx/error.hpp"
#include "arx/keyvalue.hpp"
#include "arx/signals.hpp"

namespace arx {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

}  // namespace

std::optional<std::size_t> CsvTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path.string() + "'");

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  const std::string where = path.filename().string();
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto cells = split(view);
    if (table.header.empty()) {
      for (auto c : cells) table.header.push_back(unquote(c));
      table.columns.resize(table.header.size());
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorKind::parse,
                  where + " line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(cells.size()),
                  line_no);
    }
    const std::size_t row = table.rows();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::string_view cell = cells[c];
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorKind::parse,
                    where + " line " + std::to_string(line_no) + ": column '" + table.header[c] +
                        "' holds non-numeric value '" + std::string(cells[c]) + "'",
                    line_no);
      }
      if (!std::isfinite(value)) {
        throw Error(ErrorKind::data,
                    where + ": non-finite value in column '" + table.header[c] + "' at index " +
                        std::to_string(row) + " (line " + std::to_string(line_no) + ")",
                    row);
      }
      table.columns[c].push_back(value);
    }
  }
  if (table.header.empty()) throw Error(ErrorKind::parse, where + ": missing header row");
  return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot open '" + path.string() + "' for writing");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << (c ? "," : "") << format_double(columns[c][r]);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::config, "failed writing '" + path.string() + "'");
}

IdentDataset load_dataset(const std::filesystem::path& path, const Schema& schema, double dt) {
  if (schema.inputs.empty()) throw Error(ErrorKind::schema, "schema names no input column");
  if (schema.output.empty()) throw Error(ErrorKind::schema, "schema names no output column");
  const CsvTable table = read_csv(path);

  auto column = [&](const std::string& name, const char* role) -> const std::vector<double>& {
    const auto idx = table.find(name);
    if (!idx) throw Error(ErrorKind::schema, std::string(role) + " column " + name + " not found");
    return table.columns[*idx];
  };

  if (table.rows() == 0) throw Error(ErrorKind::data, path.filename().string() + ": no data rows");

  if (schema.time) {
    const auto& t = column(*schema.time, "time");
    for (std::size_t k = 1; k < t.size(); ++k) {
      const double step = t[k] - t[k - 1];
      if (std::abs(step - dt) > time_uniformity_tolerance * dt) {
        throw Error(ErrorKind::data,
                    "non-uniform time step at index " + std::to_string(k) + ": " +
                        format_double(step) + " vs dt " + format_double(dt),
                    k);
      }
    }
  }

  std::vector<NamedSignal> inputs;
  for (const auto& name : schema.inputs) {
    inputs.push_back({name, Signal(column(name, "input"), dt)});
  }
  NamedSignal output{schema.output, Signal(column(schema.output, "output"), dt)};

  Ambient ambient;
  if (schema.ambient_column) {
    ambient = Signal(column(*schema.ambient_column, "ambient"), dt);
  } else if (schema.ambient_scalar) {
    ambient = *schema.ambient_scalar;
  }
  return IdentDataset(std::move(inputs), std::move(output), std::move(ambient),
                      path.filename().string());
}

void save_dataset(const std::filesystem::path& path, const IdentDataset& dataset,
                  const std::string& ambient_name) {
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> columns;
  std::vector<double> t(dataset.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k) * dataset.dt();
  columns.push_back(std::move(t));
  for (const auto& in : dataset.inputs()) {
    header.push_back(in.name);
    columns.push_back(in.signal.values());
  }
  header.push_back(dataset.output().name);
  columns.push_back(dataset.output().signal.values());
  if (const auto* trace = std::get_if<Signal>(&dataset.ambient())) {
    header.push_back(ambient_name);
    columns.push_back(trace->values());
  }
  write_csv(path, header, columns);
}

}  // namespace arx
