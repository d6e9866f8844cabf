#pragma once

#include <stdexcept>
#include <string>

namespace dmcalc {

// All library failures derive from Error so callers can catch one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonSquare : Error {
  using Error::Error;
};
struct AsymmetricInput : Error {
  using Error::Error;
};
struct ConvergenceFailure : Error {
  using Error::Error;
};
struct NotPsd : Error {
  using Error::Error;
};
struct NotStrictlyPd : Error {
  using Error::Error;
};
struct BadRank : Error {
  using Error::Error;
};
struct BadWeights : Error {
  using Error::Error;
};
struct BadDistribution : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotProjector : Error {
  using Error::Error;
};
struct DegenerateMarginal : Error {
  using Error::Error;
};
struct ZeroConditioningMass : Error {
  using Error::Error;
};
struct ZeroEvidence : Error {
  using Error::Error;
};
struct ZeroMass : Error {
  using Error::Error;
};
struct NotSkew : Error {
  using Error::Error;
};
struct NotOrthogonal : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace dmcalc
