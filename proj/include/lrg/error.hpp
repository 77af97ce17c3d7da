#pragma once

#include <stdexcept>
#include <string>

namespace lrg {

// Base for every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Caller violated a shape or precondition contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

// A metric is undefined for the given input (e.g. fewer than two points).
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrg
