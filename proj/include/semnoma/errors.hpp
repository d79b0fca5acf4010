#pragma once

#include <stdexcept>
#include <string>

namespace semnoma {

/// Bad user-supplied configuration (dimensions, ranges, missing fields).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched array/grid dimensions between objects that must align.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine left its domain of validity (singular system, NaN).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File-format or filesystem failure.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Checkpoint or manifest written by an incompatible version.
struct VersionError : std::runtime_error {
  explicit VersionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semnoma
