#include "arx/error.hpp"

namespace arx {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::schema: return "schema error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::data: return "data error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::size: return "size error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::rank: return "rank error";
    case ErrorKind::divergence: return "divergence error";
    case ErrorKind::selection: return "selection error";
    case ErrorKind::degenerate: return "degenerate error";
    case ErrorKind::format: return "format error";
    case ErrorKind::version: return "version error";
    case ErrorKind::config: return "config error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      index_(index) {}

}  // namespace arx
