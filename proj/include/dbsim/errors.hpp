#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dbsim {

/// One violated configuration rule.
struct ConfigViolation {
    std::string field;
    std::string rule;
};

/// Thrown by validation with every violated invariant, not just the first.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<ConfigViolation> violations)
        : std::runtime_error(format(violations)), violations_(std::move(violations)) {}

    ConfigError(std::string field, std::string rule)
        : ConfigError(std::vector<ConfigViolation>{{std::move(field), std::move(rule)}}) {}

    const std::vector<ConfigViolation>& violations() const { return violations_; }

  private:
    static std::string format(const std::vector<ConfigViolation>& vs) {
        std::string msg = "invalid configuration:";
        for (const auto& v : vs) {
            msg += "\n  " + v.field + ": " + v.rule;
        }
        return msg;
    }

    std::vector<ConfigViolation> violations_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented contract (e.g. delivering bits to an idle user).
class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// A metric was requested from a record set with no defined samples.
class NoDataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive search would exceed the configured profile budget.
class InfeasibleSearch : public std::runtime_error {
  public:
    InfeasibleSearch(double required, double budget)
        : std::runtime_error("exhaustive search needs " + std::to_string(required) +
                             " profiles, budget is " + std::to_string(budget)),
          required_profiles(required) {}

    double required_profiles;
};

} // namespace dbsim
