#pragma once

#include <stdexcept>
#include <string>

namespace circlesys {

// Bad or malformed input: wrong arity, out-of-range index, unparsable file.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameters parse but violate a structural constraint (divisibility, counts).
struct ConstraintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configured size cap would be exceeded.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A symbolic point whose stage positions do not nest.
struct CoherenceError : std::runtime_error {
    int stage;
    CoherenceError(const std::string& what, int st) : std::runtime_error(what), stage(st) {}
};

// Numeric realization could not reach the requested tolerance.
struct ToleranceError : std::runtime_error {
    double achieved;
    ToleranceError(const std::string& what, double got) : std::runtime_error(what), achieved(got) {}
};

// Two independent computations of the same object disagree.
struct OracleMismatch : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace circlesys
