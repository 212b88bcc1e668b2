#pragma once

#include <stdexcept>
#include <string>

namespace pbsim {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: dimensions, parameters, configuration. Maps to CLI exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a valid answer. Maps to CLI exit code 3.
class SolverError : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public InputError {
 public:
  using InputError::InputError;
};

class InvalidEmbedding : public InputError {
 public:
  using InputError::InputError;
};

/// Matrix handed to DensityMatrix violates hermiticity, trace or positivity.
class InvalidState : public InputError {
 public:
  using InputError::InputError;
};

class InvalidParameter : public InputError {
 public:
  using InputError::InputError;
};

/// Undamped resonant cavity drive: the mean photon number diverges.
class DivergentDrive : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// Zero cavity-cavity coupling in the two-cavity reduction.
class ZeroCoupling : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// First-order supermode expansion requested outside |delta_b| << J.
class ExpansionInvalid : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

class InvalidFrequency : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class FileError : public InputError {
 public:
  FileError(const std::string& path, const std::string& what)
      : InputError(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class DegenerateSteadyState : public SolverError {
 public:
  using SolverError::SolverError;
};

class TruncationTooSmall : public SolverError {
 public:
  using SolverError::SolverError;
};

class StepSizeError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// <b^dagger b> below the occupation floor; the ratio g^(n) is undefined.
class UndefinedCorrelation : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Coarse-grid minimum sits on the sweep boundary; the range must be widened.
class BoundaryMinimum : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace pbsim
