#pragma once

#include <stdexcept>
#include <string>

namespace uvtomo {

// Bad arguments: empty inputs, out-of-range indices, infeasible parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A precondition of the mathematical model is violated (e.g. k0 beyond
// the alias-free limit, k0 below the QBL threshold).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or inconsistent files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

} // namespace detail
} // namespace uvtomo
