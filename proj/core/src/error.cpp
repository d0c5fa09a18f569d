#include "lexbias/error.hpp"

namespace lexbias {

std::string Diagnostic::str() const {
  std::string out = source.empty() ? "<input>" : source;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": " + message;
  return out;
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += '\n';
    out += d.str();
  }
  return out.empty() ? "validation failed" : out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

ValidationError::ValidationError(const std::string& message)
    : Error(message), diagnostics_{Diagnostic{"", 0, message}} {}

}  // namespace lexbias
