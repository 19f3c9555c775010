#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arx {

/// Category of a failure. The CLI maps each kind onto an exit code.
enum class ErrorKind {
  schema,      // a named column is missing from a file
  parse,       // malformed text (CSV cell, ragged row)
  data,        // non-finite sample, non-uniform time axis
  parameter,   // argument outside its documented domain
  size,        // not enough samples for the requested orders
  shape,       // input count or length mismatch
  rank,        // solve on rank-0 factors
  divergence,  // free-run simulation left the finite range
  selection,   // every candidate of a grid search is unstable
  degenerate,  // fit metric on a constant signal
  format,      // malformed model / report / scenario file
  version,     // unsupported format_version
  config,      // invalid scenario or run configuration
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }

  /// Sample index or line number the error refers to, when there is one.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace arx
