#pragma once

#include <stdexcept>
#include <string>

namespace ptstrip {

// Error hierarchy shared by all modules.  Every failure that callers are
// expected to handle gets its own type; plain std::invalid_argument is used
// for programming errors (bad sizes, null handles).

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// |alpha| d / pi is an integer within tolerance: the biorthonormal basis
// degenerates (vanishing normalization denominator).
struct DegenerateCoupling : Error {
  explicit DegenerateCoupling(const std::string& msg) : Error(msg) {}
};

struct InvalidGeometry : Error {
  explicit InvalidGeometry(const std::string& msg) : Error(msg) {}
};

struct OutOfDomain : Error {
  explicit OutOfDomain(const std::string& msg) : Error(msg) {}
};

struct MismatchedGeometry : Error {
  explicit MismatchedGeometry(const std::string& msg) : Error(msg) {}
};

// Spectral parameter too close to a branch point of the secular function.
struct ThresholdProximity : Error {
  explicit ThresholdProximity(const std::string& msg) : Error(msg) {}
};

struct NoConvergence : Error {
  explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

// Two smallest singular values nearly coincide: the null direction is not
// unique (possible exceptional point).
struct IllConditionedNullspace : Error {
  explicit IllConditionedNullspace(const std::string& msg) : Error(msg) {}
};

struct NotSymmetric : Error {
  explicit NotSymmetric(const std::string& msg) : Error(msg) {}
};

struct InvalidChannel : Error {
  explicit InvalidChannel(const std::string& msg) : Error(msg) {}
};

struct SeriesNotConverged : Error {
  explicit SeriesNotConverged(const std::string& msg) : Error(msg) {}
};

struct NoEigenvaluePredicted : Error {
  explicit NoEigenvaluePredicted(const std::string& msg) : Error(msg) {}
};

struct ConfigInvalid : Error {
  explicit ConfigInvalid(const std::string& msg) : Error(msg) {}
};

struct MissingField : Error {
  explicit MissingField(const std::string& msg) : Error(msg) {}
};

}  // namespace ptstrip
