#pragma once

#include <stdexcept>
#include <string>

namespace maxdist {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid correlation sequence or dimension.
struct BadSpecError : Error {
  using Error::Error;
};

/// Covariance matrix has an eigenvalue below the PSD tolerance.
struct NotPSDError : Error {
  using Error::Error;
};

/// Kurtosis outside the admissible range [1, 5).
struct BadKurtosisError : Error {
  using Error::Error;
};

/// Probability argument outside (0, 1).
struct BadProbabilityError : Error {
  using Error::Error;
};

/// Statistic requires more observations than were supplied.
struct TooFewRowsError : Error {
  using Error::Error;
};

/// Nonpositive scale where a positive one is required.
struct BadScaleError : Error {
  using Error::Error;
};

/// Unsupported overlap/coordinate pattern.
struct BadPatternError : Error {
  using Error::Error;
};

/// Generic invalid numeric argument.
struct BadArgumentError : Error {
  using Error::Error;
};

/// Empty input where at least one sample is required.
struct EmptySampleError : Error {
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Unreadable or malformed data file.
struct DataError : Error {
  using Error::Error;
};

}  // namespace maxdist
