#include "nearcommute/commuting_oracle.hpp"

#include "nearcommute/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace nearcommute {

namespace {

constexpr double kRotationThreshold = 1e-15;

// Entry by entry: total-minus-diagonal loses everything once the off-diagonal
// mass falls below eps * ||A||_F^2.
double off_exact(const Matrix& m) {
    double s = 0.0;
    for (Index c = 0; c < m.cols(); ++c) {
        for (Index r = 0; r < m.rows(); ++r) {
            if (r != c) s += std::norm(m(r, c));
        }
    }
    return s;
}

// M <- G^dagger M G on rows/cols (p, q), G = [[c, -conj(s)], [s, c]].
void rotate(Matrix& m, Index p, Index q, double c, Complex s) {
    const Complex sc = std::conj(s);
    for (Index r = 0; r < m.rows(); ++r) {
        const Complex mp = m(r, p);
        const Complex mq = m(r, q);
        m(r, p) = c * mp + s * mq;
        m(r, q) = -sc * mp + c * mq;
    }
    for (Index col = 0; col < m.cols(); ++col) {
        const Complex mp = m(p, col);
        const Complex mq = m(q, col);
        m(p, col) = c * mp + sc * mq;
        m(q, col) = -s * mp + c * mq;
    }
}

// Closed-form rotation maximizing the summed squared diagonal entries of the
// (p, q) blocks of both matrices. Returns false when no rotation is needed.
bool pair_rotation(const Matrix& a, const Matrix& b, Index p, Index q, double& c, Complex& s) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    double offdiag = 0.0;
    for (const Matrix* m : {&a, &b}) {
        const Complex mpq = 0.5 * ((*m)(p, q) + std::conj((*m)(q, p)));
        Eigen::Vector3d h((*m)(p, p).real() - (*m)(q, q).real(), 2.0 * mpq.real(), 2.0 * mpq.imag());
        g += h * h.transpose();
        offdiag += std::norm(mpq);
    }
    if (offdiag == 0.0) return false;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g);
    Eigen::Vector3d v = es.eigenvectors().col(2); // largest eigenvalue
    // Identity-preferring sign: rotation angle in (-pi/4, pi/4].
    if (v(0) < 0.0) v = -v;
    if (std::abs(v(0)) <= std::numeric_limits<double>::epsilon()) {
        const double lead = std::abs(v(1)) > std::numeric_limits<double>::epsilon() ? v(1) : v(2);
        if (lead < 0.0) v = -v;
    }
    c = std::sqrt(0.5 + 0.5 * std::min(1.0, v(0)));
    s = 0.5 * Complex(v(1), -v(2)) / c;
    return std::abs(s) > kRotationThreshold;
}

} // namespace

double off_measure(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw InvalidInput("off_measure: dimension mismatch");
    }
    return off_exact(a) + off_exact(b);
}

double off_measure_slack(const Matrix& a, const Matrix& b) {
    return 64.0 * std::numeric_limits<double>::epsilon() * (a.squaredNorm() + b.squaredNorm());
}

CommutingHermitianPair nearest_commuting_pair(const HermitianMatrix& a, const HermitianMatrix& b,
                                              const JadeOptions& opts) {
    if (a.dim() != b.dim()) throw InvalidInput("nearest_commuting_pair: dimension mismatch");
    if (opts.max_sweeps < 1) throw InvalidInput("nearest_commuting_pair: max_sweeps must be >= 1");
    const Index n = a.dim();

    Matrix ra = a.matrix();
    Matrix rb = b.matrix();
    Matrix q = Matrix::Identity(n, n);

    CommutingHermitianPair out{a, b, Matrix{}, 0.0, 0.0, false, 0, {}};
    double off = off_measure(ra, rb);
    out.off_history.push_back(off);
    // Nothing left to rotate below this.
    const double floor = 1e-32 * (ra.squaredNorm() + rb.squaredNorm());

    for (int sweep = 1; sweep <= opts.max_sweeps && !out.converged; ++sweep) {
        bool rotated = false;
        for (Index p = 0; p + 1 < n; ++p) {
            for (Index r = p + 1; r < n; ++r) {
                double c = 1.0;
                Complex s{};
                if (!pair_rotation(ra, rb, p, r, c, s)) continue;
                rotate(ra, p, r, c, s);
                rotate(rb, p, r, c, s);
                const Complex sc = std::conj(s);
                for (Index row = 0; row < n; ++row) {
                    const Complex qp = q(row, p);
                    const Complex qr = q(row, r);
                    q(row, p) = c * qp + s * qr;
                    q(row, r) = -sc * qp + c * qr;
                }
                rotated = true;
            }
        }
        out.sweeps = sweep;
        const double next = off_measure(ra, rb);
        out.off_history.push_back(next);
        const bool stalled = (off - next) <= opts.rel_improvement_tol * off;
        if (!rotated || next <= floor || stalled) out.converged = true;
        off = next;
    }

    Eigen::VectorXcd da(n), db(n);
    for (Index j = 0; j < n; ++j) {
        const auto col = q.col(j);
        da(j) = (col.adjoint() * a.matrix() * col)(0, 0).real();
        db(j) = (col.adjoint() * b.matrix() * col)(0, 0).real();
    }
    Matrix ap = q * da.asDiagonal() * q.adjoint();
    Matrix bp = q * db.asDiagonal() * q.adjoint();
    ap = 0.5 * (ap + ap.adjoint());
    bp = 0.5 * (bp + bp.adjoint());

    out.dist_a = operator_norm(ap - a.matrix());
    out.dist_b = operator_norm(bp - b.matrix());
    out.a_prime = HermitianMatrix(std::move(ap));
    out.b_prime = HermitianMatrix(std::move(bp));
    out.basis = std::move(q);
    return out;
}

} // namespace nearcommute
