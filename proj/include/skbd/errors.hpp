#pragma once

#include <stdexcept>
#include <string>

namespace skbd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to a library routine (shapes, ranges).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A configuration field is missing or out of range.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& msg)
      : Error(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Malformed input document (JSON syntax, unknown key, wrong type).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Scenario does not fit the dose grid.
class MismatchError : public Error {
 public:
  using Error::Error;
};

// No patients treated at the dose a decision was requested for.
class NoDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace skbd
