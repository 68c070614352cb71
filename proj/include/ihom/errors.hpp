#pragma once

#include <stdexcept>
#include <string>

namespace ihom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature did not reach its tolerance within the panel cap.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// The cell-problem and product routes for C² disagree.
class CoefficientMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class RootFindFailure : public Error {
 public:
  using Error::Error;
};

/// Invalid drift, simulation or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Objects built from different drift specifications were combined.
class SpecMismatch : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// A rate fit was requested on data containing exact zeros.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

}  // namespace ihom
