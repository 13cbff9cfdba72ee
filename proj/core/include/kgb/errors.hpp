#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kgb {

// Bad inputs or configuration. The CLI maps this to exit code 2.
// `code` is a stable machine-readable tag (OddN, NonZeroMean, SpeedSingular, ...).
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

// An algorithm failed at run time (Diverged, SingularSymbol, NonFinite, ...).
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
  NumericalError(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

} // namespace kgb
