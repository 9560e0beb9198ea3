#include "nearcommute/gapped_log.hpp"

#include "nearcommute/errors.hpp"
#include "nearcommute/matrix_io.hpp"
#include "nearcommute/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace nearcommute {

namespace {

// Below this |gamma t| the closed form cancels badly; use the power series.
constexpr double kSeriesCutoff = 1.0;

// int_{-1}^{1} (1-u^2)^3 u^{2m} du
double even_moment(int m) {
    const double a = 2.0 * m;
    return 2.0 * (1.0 / (a + 1.0) - 3.0 / (a + 3.0) + 3.0 / (a + 5.0) - 1.0 / (a + 7.0));
}

// Transform at gamma = 1 as a function of s = gamma t.
double unit_transform(double s) {
    s = std::abs(s);
    if (s < kSeriesCutoff) {
        // (35/32) sum_m (-1)^m s^{2m}/(2m)! * moment_m
        double sum = 0.0;
        double term = 1.0; // s^{2m}/(2m)!
        for (int m = 0; m < 30; ++m) {
            const double contrib = term * even_moment(m);
            sum += (m % 2 == 0) ? contrib : -contrib;
            if (std::abs(contrib) < 1e-19) break;
            term *= s * s / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
        }
        return 35.0 / 32.0 * sum;
    }
    // 105 j_3(s) / s^3 with j_3 the spherical Bessel function.
    const double s2 = s * s;
    const double s7 = s2 * s2 * s2 * s;
    return 105.0 * ((15.0 - 6.0 * s2) * std::sin(s) - (15.0 * s - s2 * s) * std::cos(s)) / s7;
}

double scaled_magnitude(double s) { return s * s * s * std::abs(unit_transform(s)); }

// Upper bound for s^3 |X(s)| valid and non-increasing for s >= 1.
double envelope_beyond(double s) {
    if (s < 1.0) return kernel_peak_constant();
    return 105.0 * (s * s * s + 6.0 * s * s + 15.0 * s + 15.0) / (s * s * s * s);
}

} // namespace

Complex sawtooth_coefficient(long k) {
    if (k == 0) return Complex(kPi, 0.0);
    return Complex(0.0, 1.0 / static_cast<double>(k));
}

double kernel_transform(double gamma, double t) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidInput("kernel_transform: gamma must be positive and finite");
    }
    if (!std::isfinite(t)) throw InvalidInput("kernel_transform: t must be finite");
    return unit_transform(gamma * t);
}

double kernel_peak_constant() {
    static const double peak = [] {
        // Coarse grid, then golden-section refinement around the best sample.
        constexpr double h = 1.0 / 64.0;
        double best_s = h;
        double best = 0.0;
        for (int i = 1; i <= 64 * 64; ++i) {
            const double s = i * h;
            const double v = scaled_magnitude(s);
            if (v > best) {
                best = v;
                best_s = s;
            }
        }
        double a = best_s - h;
        double b = best_s + h;
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 100; ++it) {
            const double c = b - r * (b - a);
            const double d = a + r * (b - a);
            if (scaled_magnitude(c) > scaled_magnitude(d)) b = d; else a = c;
        }
        return std::max(best, scaled_magnitude(0.5 * (a + b)));
    }();
    return peak;
}

double default_decay_constant(double gamma) {
    if (!(gamma > 0.0)) throw InvalidInput("default_decay_constant: gamma must be positive");
    return 1.001 * kernel_peak_constant() / (gamma * gamma);
}

LaurentCoefficients smoothed_coefficients(double gap, double gamma, int order) {
    if (order < 1) throw InvalidInput("smoothed_coefficients: order must be >= 1");
    if (!(gamma > 0.0)) throw InvalidInput("smoothed_coefficients: gamma must be positive");
    if (!(gap <= kPi) || !(gap > 0.0)) {
        throw InvalidInput("smoothed_coefficients: gap half-width must lie in (0, pi]");
    }
    if (!(gamma < gap)) {
        std::ostringstream os;
        os << "smoothed_coefficients: gamma " << gamma << " must be smaller than the gap " << gap;
        throw GapTooSmall(os.str(), gap);
    }

    LaurentCoefficients lc;
    lc.gamma = gamma;
    lc.order = order;
    lc.coeffs.assign(2 * static_cast<std::size_t>(order) + 1, Complex{});
    lc.coeffs[static_cast<std::size_t>(order)] = sawtooth_coefficient(0); // transform is 1 at 0
    double c_emp = 0.0;
    for (int k = 1; k <= order; ++k) {
        const Complex ck = sawtooth_coefficient(k) * kernel_transform(gamma, k);
        lc.coeffs[static_cast<std::size_t>(order + k)] = ck;
        lc.coeffs[static_cast<std::size_t>(order - k)] = std::conj(ck);
        const double kd = static_cast<double>(k);
        c_emp = std::max(c_emp, std::abs(ck) * gamma * kd * kd * kd * kd);
    }
    lc.decay_constant = c_emp;

    const double beyond = envelope_beyond(gamma * (order + 1.0)) / (gamma * gamma);
    const double kd = static_cast<double>(order);
    lc.tail = 2.0 * std::max(c_emp, beyond) / (3.0 * gamma * kd * kd * kd);
    return lc;
}

double evaluate_smoothed_sawtooth(double theta, double gamma, int order) {
    if (!(gamma > 0.0) || !(gamma < kPi)) {
        throw InvalidInput("evaluate_smoothed_sawtooth: gamma must lie in (0, pi)");
    }
    if (order < 1) throw InvalidInput("evaluate_smoothed_sawtooth: order must be >= 1");
    // c_k e^{ik t} + conj(c_k) e^{-ik t} = -2 X(gamma k) sin(k t) / k
    double sum = 0.0;
    for (int k = order; k >= 1; --k) {
        sum += kernel_transform(gamma, k) * std::sin(k * theta) / k;
    }
    return kPi - 2.0 * sum;
}

int choose_truncation(double gamma, double target, double c_est) {
    if (!(gamma > 0.0) || !(target > 0.0) || !(c_est > 0.0)) {
        throw InvalidInput("choose_truncation: arguments must be positive");
    }
    const double exact = std::cbrt(2.0 * c_est / (3.0 * gamma * target));
    int k = std::max(1, static_cast<int>(std::ceil(exact)));
    // Guard against cbrt rounding either way.
    auto tail = [&](int kk) {
        const double d = static_cast<double>(kk);
        return 2.0 * c_est / (3.0 * gamma * d * d * d);
    };
    while (k > 1 && tail(k - 1) <= target) --k;
    while (tail(k) > target) ++k;
    return k;
}

int choose_truncation(double gamma, double target) {
    return choose_truncation(gamma, target, default_decay_constant(gamma));
}

double measured_decay_exponent(const LaurentCoefficients& c) {
    // Bin maxima on a logarithmic grid track the upper envelope of the
    // oscillating coefficients.
    const int lo = std::max(1, c.order / 8);
    const int hi = c.order;
    if (hi - lo < 8) return std::nan("");
    constexpr int bins = 12;
    const double step = std::log(static_cast<double>(hi) / lo) / bins;
    std::vector<double> xs, ys;
    for (int b = 0; b < bins; ++b) {
        const int from = static_cast<int>(std::floor(lo * std::exp(b * step)));
        const int to = std::min(hi, static_cast<int>(std::ceil(lo * std::exp((b + 1) * step))));
        double best = 0.0;
        int at = from;
        for (int k = std::max(from, 1); k <= to; ++k) {
            const double v = std::abs(c.at(k));
            if (v > best) {
                best = v;
                at = k;
            }
        }
        if (best > 0.0) {
            xs.push_back(std::log(static_cast<double>(at)));
            ys.push_back(std::log(best));
        }
    }
    if (xs.size() < 3) return std::nan("");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

void write_coefficients_csv(std::ostream& out, const LaurentCoefficients& c) {
    out << "# gamma=" << format_double(c.gamma) << " K=" << c.order
        << " C_emp=" << format_double(c.decay_constant) << " tail=" << format_double(c.tail)
        << " decay_exponent=" << format_double(measured_decay_exponent(c)) << '\n';
    out << "k,re,im,scaled\n";
    for (int k = -c.order; k <= c.order; ++k) {
        const Complex ck = c.at(k);
        const double kd = static_cast<double>(k);
        const double scaled = std::abs(ck) * c.gamma * kd * kd * kd * kd;
        out << k << ',' << format_double(ck.real()) << ',' << format_double(ck.imag()) << ','
            << format_double(k == 0 ? 0.0 : scaled) << '\n';
    }
}

GappedLog gapped_log(const UnitaryMatrix& centered, double gamma, int order,
                     const Tolerances& tol) {
    tol.validate();
    if (!(gamma > 0.0)) throw InvalidInput("gapped_log: gamma must be positive");
    const Matrix& u = centered.matrix();
    const Index n = u.rows();

    const Eigensystem es = unitary_eigensystem(centered);
    const double gap = gap_at_zero(es.angles);
    if (!(gamma < gap)) {
        std::ostringstream os;
        os << "gapped_log: gap half-width around angle 0 is " << gap
           << ", need it larger than gamma = " << gamma;
        throw GapTooSmall(os.str(), gap);
    }
    if (order <= 0) order = choose_truncation(gamma, tol.series_target);

    LaurentCoefficients coeffs = smoothed_coefficients(std::min(gap, kPi), gamma, order);
    if (coeffs.tail > tol.series_target) {
        std::ostringstream os;
        os << "gapped_log: tail bound " << coeffs.tail << " exceeds target " << tol.series_target
           << " at K = " << order << "; increase K or gamma";
        throw PreconditionError(os.str());
    }

    Matrix h = Matrix::Identity(n, n) * coeffs.at(0);
    Matrix power = Matrix::Identity(n, n);
    Matrix next(n, n);
    for (int k = 1; k <= order; ++k) {
        next.noalias() = power * u;
        power.swap(next);
        const Complex ck = coeffs.at(k);
        h += ck * power + std::conj(ck) * power.adjoint();
    }
    const double herm_tol = std::max(tol.hermiticity, 1e-12 * static_cast<double>(n) * order);
    return GappedLog{HermitianMatrix(std::move(h), herm_tol), std::move(coeffs), gap};
}

GappedLog gapped_log(const UnitaryMatrix& centered, double gamma, int order) {
    return gapped_log(centered, gamma, order, Tolerances::for_dimension(centered.dim()));
}

HermitianMatrix direct_log(const UnitaryMatrix& u) {
    const Eigensystem es = unitary_eigensystem(u);
    constexpr double kBranchTol = 1e-9;
    for (double a : es.angles) {
        if (a < kBranchTol || a > kTwoPi - kBranchTol) {
            std::ostringstream os;
            os << "direct_log: eigenangle " << a << " lies on the branch cut at 0";
            throw PreconditionError(os.str());
        }
    }
    const Index n = u.dim();
    Eigen::VectorXcd phi(n);
    for (Index j = 0; j < n; ++j) phi(j) = es.angles[static_cast<std::size_t>(j)];
    Matrix h = es.basis * phi.asDiagonal() * es.basis.adjoint();
    return HermitianMatrix(std::move(h));
}

} // namespace nearcommute
