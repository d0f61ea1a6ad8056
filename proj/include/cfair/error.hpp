#pragma once

#include <stdexcept>
#include <string>

namespace cfair {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or contradictory user configuration (schema, audit config).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot be read or does not conform to its schema.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A linear system that has no unique least-squares solution.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Iterative training that diverged or failed to reach its tolerance.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// A metric that is undefined for the given input, e.g. single-class ROC.
class MetricUndefined : public Error {
 public:
  using Error::Error;
};

/// Wraps any pipeline failure with the stage that produced it,
/// e.g. "dataset/apply_recipe: unknown recipe 'foo'".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace cfair
