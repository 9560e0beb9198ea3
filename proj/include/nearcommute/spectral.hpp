#pragma once

// Eigensystems of unitaries, spectral gaps on the unit circle, and phase
// centering so that the widest empty arc sits symmetrically around angle 0.

#include "nearcommute/linalg.hpp"

#include <span>
#include <vector>

namespace nearcommute {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383280;

/// Maps an angle to [0, 2*pi). Values within 1e-12 of 2*pi map to 0.
double normalize_angle(double a);
/// Maps an angle to (-pi, pi].
double wrap_angle(double a);

struct Eigensystem {
    std::vector<double> angles; // ascending, each in [0, 2*pi)
    Matrix basis;               // orthonormal columns, basis.col(j) <-> angles[j]

    // sum_j e^{i angles_j} v_j v_j^dagger
    Matrix reconstruct() const;
};

struct GapInfo {
    double center = 0.0;     // midpoint of the empty arc, in [0, 2*pi)
    double half_width = 0.0; // in (0, pi]; capped at pi
    double lo = 0.0;         // arc start (an eigenangle)
    double hi = 0.0;         // arc end (an eigenangle), normalized
};

/// Eigenangles via the complex Schur form: for a unitary the triangular factor
/// is diagonal up to rounding, so the Schur vectors are an exactly orthonormal
/// eigenbasis. Throws InvalidInput if an eigenvalue modulus is off 1 by >1e-6.
Eigensystem unitary_eigensystem(const UnitaryMatrix& u);

/// Widest empty open arc between circularly consecutive angles. Ties (equal
/// length within 1e-12) go to the arc whose center has the smallest angle.
GapInfo largest_gap(std::span<const double> angles);
GapInfo largest_gap(const Eigensystem& es);

/// Half-width of the empty arc around angle 0: min_j |wrap(angle_j)|.
double gap_at_zero(std::span<const double> angles);

struct CenteredUnitary {
    UnitaryMatrix matrix; // e^{-i phase} U
    double phase;         // applied rotation, in (-pi, pi]
    GapInfo gap;          // gap of the rotated matrix; center is 0
    Eigensystem eigen;    // eigensystem of the rotated matrix
};

CenteredUnitary center_gap(const UnitaryMatrix& u);

} // namespace nearcommute
