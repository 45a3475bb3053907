#pragma once

#include <stdexcept>
#include <string>

namespace famext {

// Argument outside an operation's domain (universe mismatch, non-element set, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A documented precondition does not hold (inconsistent measures, bound violations, ...).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// A configured enumeration or size cap was exceeded.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// No object satisfies the requested norm cap (an extension sweep found an
// unextendable vertex, or a simulation step could not stay within its bounds).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace famext
