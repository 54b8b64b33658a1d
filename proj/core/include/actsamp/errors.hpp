#ifndef ACTSAMP_ERRORS_HPP
#define ACTSAMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace actsamp {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Characteristic evaluated outside its domain (e.g. ratio with zero denominator).
class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A scheme construction produced no usable probabilities (all scores zero).
class DegenerateScheme : public Error {
public:
  explicit DegenerateScheme(const std::string& msg) : Error(msg) {}
};

// Leverage (or another least squares step) hit a numerically singular design.
class SingularDesign : public Error {
public:
  explicit SingularDesign(const std::string& msg) : Error(msg) {}
};

// Surrogate model could not be fitted.
class FitFailed : public Error {
public:
  explicit FitFailed(const std::string& msg) : Error(msg) {}
};

// Variance estimation asked for a within-batch spread with fewer than 2 draws.
class BatchTooSmall : public Error {
public:
  explicit BatchTooSmall(const std::string& msg) : Error(msg) {}
};

// Label oracle failed to produce a response.
class OracleFailure : public Error {
public:
  explicit OracleFailure(const std::string& msg) : Error(msg) {}
};

// Bad user-supplied configuration.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace actsamp

#endif
