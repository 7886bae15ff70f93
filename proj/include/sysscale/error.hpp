#pragma once

#include <stdexcept>
#include <string>

namespace sysscale {

/// Base for every error the library raises. `code()` is a stable,
/// machine-readable tag the CLI prints on failure.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string &what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string &code() const { return code_; }

  private:
    std::string code_;
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string &what) : Error("config", what) {}
};

class ParseError : public Error {
  public:
    explicit ParseError(const std::string &what) : Error("parse", what) {}
};

class InvariantError : public Error {
  public:
    explicit InvariantError(const std::string &what)
        : Error("invariant", what) {}
};

class OutOfRangeError : public Error {
  public:
    explicit OutOfRangeError(const std::string &what)
        : Error("out_of_range", what) {}
};

class LookupError : public Error {
  public:
    explicit LookupError(const std::string &what) : Error("lookup", what) {}
};

class CalibrationError : public Error {
  public:
    explicit CalibrationError(const std::string &what)
        : Error("calibration", what) {}
};

class InfeasibleTdpError : public Error {
  public:
    explicit InfeasibleTdpError(const std::string &what)
        : Error("infeasible_tdp", what) {}
};

class TransitionError : public Error {
  public:
    explicit TransitionError(const std::string &what)
        : Error("transition", what) {}
};

class FitError : public Error {
  public:
    explicit FitError(const std::string &what) : Error("fit_failure", what) {}
};

} // namespace sysscale
