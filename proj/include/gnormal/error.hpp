#pragma once

#include <stdexcept>
#include <string>

namespace gnormal {

enum class ErrorKind {
    domain,       // argument outside an operation's mathematical domain
    range,        // lookup outside a valid interval
    cfl,          // time step violates the monotonicity bound
    instability,  // non-finite values appeared during time stepping
    io,
    usage,
};

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace gnormal
