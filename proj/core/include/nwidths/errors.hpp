#pragma once

#include <stdexcept>
#include <string>

namespace nwidths {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};
struct OutOfRange : Error {
  using Error::Error;
};
struct DegenerateDenominator : Error {
  using Error::Error;
};
struct UncoveredCase : Error {
  using Error::Error;
};
struct RegimeUnsupported : Error {
  using Error::Error;
};
struct UnsupportedSource : Error {
  using Error::Error;
};
struct AmbiguousDominance : Error {
  using Error::Error;
};
struct InclusionFailed : Error {
  using Error::Error;
};

// Thrown when the brute-force oracle runs out of iterations; keeps what it found.
struct BudgetExceeded : Error {
  BudgetExceeded(const std::string& what, double best) : Error(what), best_value(best) {}
  double best_value;
};

}  // namespace nwidths
