#pragma once

#include <stdexcept>
#include <string>

namespace nearcommute {

// Malformed arguments: non-finite entries, dimension mismatch, bad file contents.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A mathematical hypothesis of an operation does not hold for the given input
// (no spectral gap, gamma >= gap, eigenvalue on the branch cut, ...).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A spectral gap narrower than required. Carries the measured half-widths.
class GapTooSmall : public PreconditionError {
public:
    GapTooSmall(const std::string& what, double gap_first, double gap_second = -1.0)
        : PreconditionError(what), gap_first_(gap_first), gap_second_(gap_second) {}

    double gap_first() const noexcept { return gap_first_; }
    // Negative when only one matrix was checked.
    double gap_second() const noexcept { return gap_second_; }

private:
    double gap_first_;
    double gap_second_;
};

// Solver failure, residual blow-up, or a violated post-condition.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nearcommute
