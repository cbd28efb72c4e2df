#pragma once

#include <stdexcept>
#include <string>

namespace autospec {

// Common base so callers can catch everything the library throws with one handler.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or extent disagreement between operands. Messages name both shapes.
class DimensionError : public Error {
public:
  using Error::Error;
};

// NaN/Inf showed up where finite values are required.
class NumericError : public Error {
public:
  using Error::Error;
};

// An iterative routine ran out of its iteration budget.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

// A documented API precondition was violated (stale tape, unsorted spectrum, ...).
class ContractError : public Error {
public:
  using Error::Error;
};

// A configuration object fails validation (bad dims, empty group, unknown panel).
class ConfigError : public Error {
public:
  using Error::Error;
};

// A scalar argument is outside its mathematical domain (df <= 0, lr <= 0, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

// Malformed input bytes (IDX magic, CSV schema). Messages carry a byte/line offset.
class FormatError : public Error {
public:
  using Error::Error;
};

// Filesystem-level failure: missing file, unwritable directory, rename failure.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace autospec
