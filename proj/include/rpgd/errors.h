#pragma once

#include <stdexcept>
#include <string>

namespace rpgd {

/// Shape mismatch, bad parameter value, or objects living on different
/// manifolds.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The request leaves the region where a map is defined (cut locus,
/// injectivity ball).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The manifold has no closed form for the requested map (e.g. the Stiefel
/// logarithm).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rpgd
