#pragma once

// Line-oriented "key = value" text used for model files, reports and
// scenario configs. '#' starts a comment line; blank lines are ignored.
// Numbers are written with 17 significant digits so they round-trip.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arx {

std::string format_double(double value);
std::string format_doubles(const std::vector<double>& values);

/// Parses a full-string double; throws Error(parse) naming `what` otherwise.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

class KeyValueWriter {
 public:
  void comment(std::string_view text);
  void put(std::string_view key, std::string_view value);
  void put(std::string_view key, const char* value) { put(key, std::string_view(value)); }
  void put(std::string_view key, double value);
  void put(std::string_view key, long long value);
  void put(std::string_view key, int value) { put(key, static_cast<long long>(value)); }
  void put(std::string_view key, std::size_t value) { put(key, static_cast<long long>(value)); }
  void put(std::string_view key, bool value);
  void put(std::string_view key, const std::vector<double>& values);
  void blank();

  const std::string& str() const { return text_; }
  void write_file(const std::filesystem::path& path) const;

 private:
  std::string text_;
};

class KeyValueDocument {
 public:
  /// `kind` names the document in error messages ("model file", ...).
  static KeyValueDocument parse(std::string_view text, std::string kind);
  static KeyValueDocument read_file(const std::filesystem::path& path, std::string kind);

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key) const;
  long long get_integer(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::string kind_;
  std::map<std::string, std::string> entries_;
};

}  // namespace arx
