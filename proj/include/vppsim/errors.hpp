#pragma once

#include <stdexcept>
#include <string>

namespace vppsim {

/// Base class for every error the simulator raises on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Network graph is disconnected (or otherwise yields a singular system).
struct SingularNetwork : Error {
  using Error::Error;
};

/// Injections do not balance and no slack may absorb the residual.
struct ImbalanceError : Error {
  using Error::Error;
};

/// A dynamics state became non-finite during integration.
struct UnstableStep : Error {
  using Error::Error;
};

/// A grant was delivered to a device that has no pending request.
struct InvalidGrant : Error {
  using Error::Error;
};

/// Matrix/vector dimensions of a QP do not line up.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// Quadratic cost failed the positive-semidefiniteness probe.
struct NonConvex : Error {
  using Error::Error;
};

/// Forecast series does not cover the requested horizon.
struct ForecastGap : Error {
  using Error::Error;
};

/// QP iteration limit reached without an optimality or infeasibility
/// certificate.
struct SolverFailure : Error {
  using Error::Error;
};

/// Invalid configuration; message carries the path of the offending field.
struct ConfigError : Error {
  using Error::Error;
};

/// Two traces do not share a sample grid / column layout.
struct GridMismatch : Error {
  using Error::Error;
};

/// File could not be read or written.
struct IoError : Error {
  using Error::Error;
};

}  // namespace vppsim
