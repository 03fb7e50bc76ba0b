#pragma once

#include <stdexcept>
#include <string>

namespace driftguard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Distribution parameters outside their domain (e.g. non-positive Beta shape).
class ParameterDomainError : public Error {
  public:
    using Error::Error;
};

/// An input value outside the accepted range.
class InputDomainError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

/// All samples identical; no spread to fit a distribution to.
class DegenerateSampleError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Non-finite value produced during a forward or backward pass.
class NumericError : public Error {
  public:
    NumericError(const std::string& what, int layer) : Error(what), layer_(layer) {}
    int layer() const noexcept { return layer_; }

  private:
    int layer_;
};

/// Misuse of a write-once or ordered structure (e.g. the accuracy matrix).
class ProtocolError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace driftguard
