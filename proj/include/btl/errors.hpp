#pragma once

#include <stdexcept>
#include <string>

namespace btl {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidDist : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct InvalidQuantile : Error {
  using Error::Error;
};
struct NoDensity : Error {
  using Error::Error;
};
struct QuadNoConverge : Error {
  using Error::Error;
};
struct BadPredicate : Error {
  using Error::Error;
};
struct DegenerateInstance : Error {
  using Error::Error;
};
struct QuantileOrderViolated : Error {
  using Error::Error;
};
struct InvalidM : Error {
  using Error::Error;
};
struct NotRegular : Error {
  using Error::Error;
};
struct AtomicInput : Error {
  using Error::Error;
};
struct BadFamilyParams : Error {
  using Error::Error;
};
struct InfeasibleCell : Error {
  using Error::Error;
};
struct NoClosedForm : Error {
  using Error::Error;
};
struct NotMHR : Error {
  using Error::Error;
};

// Raised when an internal sanity bound that should hold mathematically is
// violated beyond tolerance (indicates a bug, not bad input).
struct BoundViolation : Error {
  using Error::Error;
};

}  // namespace btl
