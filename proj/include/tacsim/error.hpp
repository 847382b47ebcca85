#pragma once

#include <stdexcept>
#include <string>

namespace tacsim {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments violate a documented precondition (bad shape parameters,
/// mismatched image sizes, out-of-range forces).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The requested penetration volume cannot be reached inside the
/// admissible depth bracket; the force is non-physical for the geometry.
class UnreachableVolume : public Error {
 public:
  using Error::Error;
};

/// Optical or penetration calibration could not produce a model.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// A least-squares problem is singular or a correction is unphysical.
class FitError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tacsim
