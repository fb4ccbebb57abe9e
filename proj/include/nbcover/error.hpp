#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nbcover {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  // 0 when the error is not tied to a particular line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An algorithm was called on a protocol outside its domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ReplayError : public Error {
 public:
  ReplayError(std::size_t step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace nbcover
