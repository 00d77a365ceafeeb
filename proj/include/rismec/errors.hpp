#pragma once

#include <stdexcept>
#include <string>

namespace rismec {

/// Scenario/document validation failure. Message names the offending field
/// or the violated invariant.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated a documented operation contract (precondition or
/// feasibility requirement).
class ContractViolation : public std::logic_error {
  public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Raised by test oracles that fail to converge or refuse an instance.
class OracleFailure : public std::runtime_error {
  public:
    explicit OracleFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rismec
