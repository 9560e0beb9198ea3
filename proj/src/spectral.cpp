#include "nearcommute/spectral.hpp"

#include "nearcommute/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nearcommute {

namespace {
constexpr double kAngleSnap = 1e-12;
constexpr double kTieTol = 1e-12;
constexpr double kModulusTol = 1e-6;
} // namespace

double normalize_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi - kAngleSnap) r = 0.0;
    return r;
}

double wrap_angle(double a) {
    double r = normalize_angle(a);
    if (r > kPi) r -= kTwoPi;
    return r;
}

Matrix Eigensystem::reconstruct() const {
    const Index n = basis.rows();
    Eigen::VectorXcd phases(n);
    for (Index j = 0; j < n; ++j) phases(j) = std::polar(1.0, angles[static_cast<std::size_t>(j)]);
    return basis * phases.asDiagonal() * basis.adjoint();
}

Eigensystem unitary_eigensystem(const UnitaryMatrix& u) {
    const Matrix& m = u.matrix();
    const Index n = m.rows();
    Eigen::ComplexSchur<Matrix> schur(m);
    if (schur.info() != Eigen::Success) {
        throw NumericalError("unitary_eigensystem: Schur decomposition did not converge");
    }
    const Matrix& t = schur.matrixT();
    const Matrix& q = schur.matrixU();

    std::vector<double> raw(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
        const Complex lambda = t(j, j);
        const double modulus = std::abs(lambda);
        if (std::abs(modulus - 1.0) > kModulusTol) {
            std::ostringstream os;
            os << "unitary_eigensystem: eigenvalue modulus " << modulus
               << " deviates from 1; input is not numerically unitary";
            throw InvalidInput(os.str());
        }
        // Radial projection onto the circle is implicit in taking the argument.
        raw[static_cast<std::size_t>(j)] = normalize_angle(std::arg(lambda));
    }

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });

    Eigensystem es;
    es.angles.resize(raw.size());
    es.basis.resize(n, n);
    for (std::size_t j = 0; j < order.size(); ++j) {
        es.angles[j] = raw[order[j]];
        es.basis.col(static_cast<Index>(j)) = q.col(static_cast<Index>(order[j]));
    }
    return es;
}

GapInfo largest_gap(std::span<const double> angles) {
    if (angles.empty()) throw InvalidInput("largest_gap: no angles");
    std::vector<double> a(angles.begin(), angles.end());
    for (double& x : a) x = normalize_angle(x);
    std::sort(a.begin(), a.end());

    const std::size_t n = a.size();
    GapInfo best;
    double best_len = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = a[i];
        const double hi = (i + 1 < n) ? a[i + 1] : a[0] + kTwoPi;
        const double len = hi - lo;
        const double center = normalize_angle(lo + 0.5 * len);
        const bool longer = len > best_len + kTieTol;
        const bool tie_wins = std::abs(len - best_len) <= kTieTol && center < best.center;
        if (i == 0 || longer || tie_wins) {
            best_len = len;
            best.center = center;
            best.half_width = std::min(0.5 * len, kPi);
            best.lo = lo;
            best.hi = normalize_angle(hi);
        }
    }
    return best;
}

GapInfo largest_gap(const Eigensystem& es) { return largest_gap(es.angles); }

double gap_at_zero(std::span<const double> angles) {
    double g = kPi;
    for (double a : angles) g = std::min(g, std::abs(wrap_angle(a)));
    return g;
}

CenteredUnitary center_gap(const UnitaryMatrix& u) {
    const Eigensystem es = unitary_eigensystem(u);
    const GapInfo gap = largest_gap(es);
    const double phase = wrap_angle(gap.center);

    Matrix rotated = std::polar(1.0, -phase) * u.matrix();
    Eigensystem shifted;
    shifted.angles.resize(es.angles.size());
    for (std::size_t j = 0; j < es.angles.size(); ++j) {
        shifted.angles[j] = normalize_angle(es.angles[j] - phase);
    }
    // Re-sort: the shift moves the angles that crossed 0 to the end.
    std::vector<std::size_t> order(shifted.angles.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return shifted.angles[a] < shifted.angles[b];
    });
    Eigensystem sorted;
    sorted.angles.resize(order.size());
    sorted.basis.resize(es.basis.rows(), es.basis.cols());
    for (std::size_t j = 0; j < order.size(); ++j) {
        sorted.angles[j] = shifted.angles[order[j]];
        sorted.basis.col(static_cast<Index>(j)) = es.basis.col(static_cast<Index>(order[j]));
    }

    GapInfo centered = largest_gap(sorted);
    if (std::abs(wrap_angle(centered.center)) < 1e-9) centered.center = 0.0;
    const double tol = std::max(Tolerances::for_dimension(u.dim()).unitarity, 2.0 * u.defect() + 1e-12);
    return CenteredUnitary{UnitaryMatrix(std::move(rotated), tol), phase, centered, std::move(sorted)};
}

} // namespace nearcommute
