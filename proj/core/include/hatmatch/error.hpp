#pragma once

#include <stdexcept>
#include <string>

namespace hatmatch {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable file / stream.
class IoError : public Error {
 public:
  using Error::Error;
};

// Config file missing keys, wrong types, or inconsistent values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// change_rate() with an empty "after" set, or a window with no papers.
class UndefinedRateError : public Error {
 public:
  using Error::Error;
};

// Regression design that cannot identify the requested coefficient.
class DegenerateFitError : public Error {
 public:
  DegenerateFitError(std::string dimension, const std::string& what)
      : Error(what), dimension_(std::move(dimension)) {}
  const std::string& dimension() const noexcept { return dimension_; }

 private:
  std::string dimension_;
};

// Logistic regression whose coefficients diverge (complete or quasi-complete
// separation). predictor() names the coefficient with the largest magnitude.
class SeparationError : public Error {
 public:
  SeparationError(std::string predictor, const std::string& what)
      : Error(what), predictor_(std::move(predictor)) {}
  const std::string& predictor() const noexcept { return predictor_; }

 private:
  std::string predictor_;
};

// Argument that violates an operation's precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace hatmatch
