#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cgame {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model parameters violate their invariants.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A state argument lies outside (0, inf) or outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Root bracketing or another numerical step failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The requested policy does not exist for the given inputs.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

/// Invalid simulation or command configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A quantity that the equilibrium construction guarantees turned out invalid.
class InternalError : public Error {
public:
    using Error::Error;
};

/// Named sufficient conditions of the mixed-strategy equilibrium construction.
enum class Condition {
    SymmetricDegenerate,  // c1 <= c2
    NoRoot,               // no z1 with J(z1) = J(theta*) + c1
    OptimalU,             // z1 is not the global maximiser of U1(z) - kz
    QRange,               // q outside (0, 1)
    Ordering,             // theta* < xhat < z1 < z2 broken
};

constexpr std::string_view condition_name(Condition c) {
    switch (c) {
    case Condition::SymmetricDegenerate: return "symmetric-degenerate";
    case Condition::NoRoot: return "no-root";
    case Condition::OptimalU: return "OptimalU";
    case Condition::QRange: return "q-range";
    case Condition::Ordering: return "ordering";
    }
    return "unknown";
}

/// Raised when a mixed-strategy equilibrium cannot be built; carries the
/// condition that broke.
class EquilibriumError : public Error {
public:
    EquilibriumError(Condition condition, const std::string& message)
        : Error(std::string(condition_name(condition)) + ": " + message),
          condition_(condition) {}

    Condition condition() const noexcept { return condition_; }

private:
    Condition condition_;
};

}  // namespace cgame
