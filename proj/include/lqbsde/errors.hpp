#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lqbsde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carries the assumption label ("A1", "A2") and the first failing grid index.
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(std::string assumption, std::size_t grid_index, const std::string& detail)
      : Error("assumption " + assumption + " violated at grid point " +
              std::to_string(grid_index) + ": " + detail),
        assumption_(std::move(assumption)),
        grid_index_(grid_index) {}
  const std::string& assumption() const noexcept { return assumption_; }
  std::size_t grid_index() const noexcept { return grid_index_; }

 private:
  std::string assumption_;
  std::size_t grid_index_;
};

class NonpositiveWeight : public Error {
 public:
  using Error::Error;
};

class SingularRatio : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, std::size_t grid_index)
      : Error(what + " exceeded 1e12 at grid point " + std::to_string(grid_index)),
        grid_index_(grid_index) {}
  std::size_t grid_index() const noexcept { return grid_index_; }

 private:
  std::size_t grid_index_;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class PatternMismatch : public Error {
 public:
  using Error::Error;
};

class NotAdapted : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string key, const std::string& detail)
      : Error("line " + std::to_string(line) + ", key '" + key + "': " + detail),
        line_(line),
        key_(std::move(key)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

}  // namespace lqbsde
