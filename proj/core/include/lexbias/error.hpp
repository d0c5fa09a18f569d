#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexbias {

// A problem located in an input file. line is 1-based; 0 means "whole input".
struct Diagnostic {
  std::string source;
  std::size_t line = 0;
  std::string message;

  std::string str() const;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates a schema or a domain invariant. Carries every problem
// found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);
  explicit ValidationError(const std::string& message);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// |m_full - m_l| too small for the bias ratio to be meaningful.
class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class Conflict : public Error {
 public:
  using Error::Error;
};

}  // namespace lexbias
