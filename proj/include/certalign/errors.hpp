#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace certalign {

enum class Errc {
  InvalidArgument,
  EmptyBatch,
  EmptyInput,
  CoincidentPoints,
  NearSingular,
  VerticalForward,
  RankDeficientX,
  NumericalFailure,
  SolverFailed,
  InsufficientSatellites,
  DegenerateGeometry,
  DegenerateVelocities,
  SingularNormalEquations,
  NoVisibleSatellites,
  ParseError,
  VersionMismatch,
  IoError,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised by the text readers; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(Errc::ParseError, "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace certalign
