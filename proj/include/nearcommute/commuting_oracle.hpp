#pragma once

// Exactly commuting Hermitian pair near an almost-commuting one, found by
// Jacobi-type joint approximate diagonalization: a unitary Q is built from
// 2x2 complex rotations that minimize the off-diagonal mass of Q^dagger A Q
// and Q^dagger B Q together. The diagonal parts, rotated back, commute.

#include "nearcommute/linalg.hpp"

#include <vector>

namespace nearcommute {

struct JadeOptions {
    int max_sweeps = 100;
    double rel_improvement_tol = 1e-12;
};

struct CommutingHermitianPair {
    HermitianMatrix a_prime;
    HermitianMatrix b_prime;
    Matrix basis;            // Q
    double dist_a = 0.0;     // ||A' - A||
    double dist_b = 0.0;     // ||B' - B||
    bool converged = false;
    int sweeps = 0;
    std::vector<double> off_history; // off_measure before sweep 1, then after each sweep
};

/// Sum of squared moduli of the off-diagonal entries of A and of B.
double off_measure(const Matrix& a, const Matrix& b);

/// Rounding allowance used when checking that off_measure never increases.
double off_measure_slack(const Matrix& a, const Matrix& b);

CommutingHermitianPair nearest_commuting_pair(const HermitianMatrix& a, const HermitianMatrix& b,
                                              const JadeOptions& opts = {});

} // namespace nearcommute
