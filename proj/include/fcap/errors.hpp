#pragma once

#include <stdexcept>
#include <string>

namespace fcap {

// Base class for all numerical failures raised by this library. The `op`
// argument names the operation that failed so CLI diagnostics can report it.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& op, const std::string& msg)
        : std::runtime_error(op + ": " + msg), op_(op) {}
    const std::string& op() const noexcept { return op_; }

private:
    std::string op_;
};

// Invalid argument (outside the documented domain of an operation).
class domain_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

// A series or adaptive rule failed to reach the requested tolerance within
// its node/term budget, or a truncation bound could not be met.
class convergence_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

// A Mellin-Barnes contour does not separate the left and right pole sets.
class contour_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

// A requested quantity is infinite for the given parameters (for example
// the mean for ms <= 1, or the full inverse moment for m <= 1).
class divergence_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

} // namespace fcap
