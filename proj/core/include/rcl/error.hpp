// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rcl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix length does not match the model size.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Site index outside the site set.
class SiteError : public Error {
 public:
  using Error::Error;
};

/// Operation needs more sites than the model has.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Model definition violates one of its invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Rescaling is impossible because the spectral window has zero width.
class DegenerateModelError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Caller violated a documented precondition (e.g. s outside (0,1)).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// The shifted matrix is singular to working precision.
class NearSingularError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// No finite potential at the center makes the energy an eigenvalue with a
/// nonzero center component.
class NoSolutionError : public Error {
 public:
  using Error::Error;
};

/// A sampler exhausted its retry budget.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// A conditional probability was requested where the density of states is
/// statistically indistinguishable from zero.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

}  // namespace rcl
