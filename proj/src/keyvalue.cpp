#include "arx/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "arx/error.hpp"

namespace arx {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double(values[i]);
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::format,
                "cannot parse '" + std::string(text) + "' as a number for " + std::string(what));
  }
  return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
  text = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::format,
                "cannot parse '" + std::string(text) + "' as an integer for " + std::string(what));
  }
  return value;
}

void KeyValueWriter::comment(std::string_view text) {
  text_ += "# ";
  text_ += text;
  text_ += '\n';
}

void KeyValueWriter::put(std::string_view key, std::string_view value) {
  text_ += key;
  text_ += " = ";
  text_ += value;
  text_ += '\n';
}

void KeyValueWriter::put(std::string_view key, double value) { put(key, format_double(value)); }

void KeyValueWriter::put(std::string_view key, long long value) {
  put(key, std::to_string(value));
}

void KeyValueWriter::put(std::string_view key, bool value) {
  put(key, value ? std::string_view("true") : std::string_view("false"));
}

void KeyValueWriter::put(std::string_view key, const std::vector<double>& values) {
  put(key, format_doubles(values));
}

void KeyValueWriter::blank() { text_ += '\n'; }

void KeyValueWriter::write_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot open '" + path.string() + "' for writing");
  out << text_;
  if (!out) throw Error(ErrorKind::config, "failed writing '" + path.string() + "'");
}

KeyValueDocument KeyValueDocument::parse(std::string_view text, std::string kind) {
  KeyValueDocument doc;
  doc.kind_ = std::move(kind);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::format,
                  doc.kind_ + " line " + std::to_string(line_no) + ": expected 'key = value'",
                  line_no);
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw Error(ErrorKind::format, doc.kind_ + " line " + std::to_string(line_no) + ": empty key",
                  line_no);
    }
    if (!doc.entries_.emplace(key, std::move(value)).second) {
      throw Error(ErrorKind::format,
                  doc.kind_ + " line " + std::to_string(line_no) + ": duplicate key '" + key + "'",
                  line_no);
    }
  }
  return doc;
}

KeyValueDocument KeyValueDocument::read_file(const std::filesystem::path& path, std::string kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::format, "cannot open " + kind + " '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::move(kind));
}

const std::string& KeyValueDocument::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw Error(ErrorKind::format, kind_ + ": missing key '" + key + "'");
  return it->second;
}

std::string KeyValueDocument::get_or(const std::string& key, std::string fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? std::move(fallback) : it->second;
}

double KeyValueDocument::get_double(const std::string& key) const {
  return parse_double(get(key), kind_ + " key '" + key + "'");
}

long long KeyValueDocument::get_integer(const std::string& key) const {
  return parse_integer(get(key), kind_ + " key '" + key + "'");
}

std::vector<double> KeyValueDocument::get_doubles(const std::string& key) const {
  std::vector<double> values;
  std::istringstream ss(get(key));
  std::string token;
  while (ss >> token) values.push_back(parse_double(token, kind_ + " key '" + key + "'"));
  return values;
}

bool KeyValueDocument::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw Error(ErrorKind::format, kind_ + " key '" + key + "': expected true or false");
}

}  // namespace arx
