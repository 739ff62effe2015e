#pragma once

#include <stdexcept>
#include <string>

namespace gspine {

/// Operand shapes do not fit together (ambient spaces, plane dimensions).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A geometric precondition fails beyond tolerance (containment, feasibility).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A constructed object failed its own numerical postcondition check.
class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_dims(bool ok, const std::string& what)
{
    if (!ok) throw DimensionError(what);
}

} // namespace detail
} // namespace gspine
