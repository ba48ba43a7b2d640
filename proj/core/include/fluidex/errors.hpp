#pragma once

#include <stdexcept>
#include <string>

namespace fluidex {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad names, parameters or settings. Maps to exit code 2 in the CLI.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class UnsupportedClass : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite state during time integration. Maps to exit code 3.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace fluidex
