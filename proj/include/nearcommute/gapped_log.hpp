#pragma once

// Principal-branch logarithm of a unitary with a spectral gap at angle 0,
// written as a two-sided power series
//
//     H = sum_{|k| <= K} c_k U^k,   U = e^{iH},  spec(H) in (0, 2*pi).
//
// The c_k are the Fourier coefficients of the 2*pi-periodic sawtooth f(t) = t
// on [0, 2*pi) convolved with the unit-mass bump
//
//     chi(x) = 35/(32 gamma) * (1 - (x/gamma)^2)^3   for |x| <= gamma.
//
// Convolution leaves f unchanged on (gamma, 2*pi - gamma), so as long as
// gamma is smaller than the gap half-width the smoothed series reproduces the
// logarithm on the spectrum, and its coefficients decay fast enough for the
// truncation error to be certified.

#include "nearcommute/linalg.hpp"

#include <iosfwd>
#include <vector>

namespace nearcommute {

/// Fourier coefficient of the sawtooth: pi for k = 0, i/k otherwise.
Complex sawtooth_coefficient(long k);

/// Transform of the unit-mass kernel,
///   (35/(32 gamma)) * int_{-gamma}^{gamma} (1 - (x/gamma)^2)^3 cos(t x) dx.
/// Equal to 1 at t = 0 and even in t. Throws InvalidInput for gamma <= 0.
double kernel_transform(double gamma, double t);

/// sup_s s^3 |X(s)| with X the gamma = 1 transform, so that
/// |c_k| * gamma * k^4 <= kernel_peak_constant() / gamma^2 for every k.
double kernel_peak_constant();

/// Default C_est for choose_truncation at a given gamma (with a small margin).
double default_decay_constant(double gamma);

struct LaurentCoefficients {
    double gamma = 0.0;
    int order = 0;                // K
    std::vector<Complex> coeffs;  // c_{-K} .. c_{K}
    double decay_constant = 0.0;  // C_emp = max_{0<|k|<=K} |c_k| gamma k^4
    double tail = 0.0;            // certified bound on sum_{|k|>K} |c_k|

    Complex at(int k) const { return coeffs[static_cast<std::size_t>(k + order)]; }
};

/// c_k = sawtooth_coefficient(k) * kernel_transform(gamma, k) for |k| <= K.
/// Requires 0 < gamma < gap <= pi and K >= 1 (PreconditionError otherwise).
LaurentCoefficients smoothed_coefficients(double gap, double gamma, int order);

/// sum_{|k|<=K} c_k e^{ik theta}; equals theta on (gamma, 2*pi - gamma) up to the tail.
double evaluate_smoothed_sawtooth(double theta, double gamma, int order);

/// Smallest K with 2 C_est / (3 gamma K^3) <= target.
int choose_truncation(double gamma, double target, double c_est);
int choose_truncation(double gamma, double target);

/// CSV dump: header comment, then k,re,im,scaled (= |c_k| gamma k^4).
void write_coefficients_csv(std::ostream& out, const LaurentCoefficients& c);

/// Least-squares slope of log|c_k| against log k on k in [K/8, K], fitted to
/// per-bin maxima so the zeros of the oscillating transform are skipped.
double measured_decay_exponent(const LaurentCoefficients& c);

struct GappedLog {
    HermitianMatrix log; // H with U = e^{iH}
    LaurentCoefficients coeffs;
    double gap = 0.0;    // measured half-width of the empty arc around 0
};

/// Truncated series H = sum c_k U^k. U must have its gap around angle 0 with
/// half-width > gamma (GapTooSmall otherwise). The order is chosen from
/// tol.series_target when order <= 0; a tail above series_target is rejected.
GappedLog gapped_log(const UnitaryMatrix& centered, double gamma, int order,
                     const Tolerances& tol);
GappedLog gapped_log(const UnitaryMatrix& centered, double gamma, int order = 0);

/// Eigendecomposition reference: H = sum_j phi_j v_j v_j^dagger with
/// phi_j in (0, 2*pi). PreconditionError if an eigenangle is within 1e-9 of 0.
HermitianMatrix direct_log(const UnitaryMatrix& u);

} // namespace nearcommute
