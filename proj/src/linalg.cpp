#include "nearcommute/linalg.hpp"

#include "nearcommute/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace nearcommute {

Tolerances Tolerances::for_dimension(Index n) {
    const double scale = static_cast<double>(n < 1 ? 1 : n);
    Tolerances t;
    t.unitarity = 1e-8 * scale;
    t.hermiticity = 1e-8 * scale;
    t.commute = 1e-10 * scale;
    return t;
}

void Tolerances::validate() const {
    if (!(unitarity > 0.0) || !(hermiticity > 0.0) || !(commute > 0.0) || !(series_target > 0.0)) {
        throw InvalidInput("Tolerances: all tolerances must be strictly positive");
    }
}

void require_square_finite(const Matrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw InvalidInput(std::string(what) + ": matrix must be square and non-empty");
    }
    if (!m.allFinite()) {
        throw InvalidInput(std::string(what) + ": matrix has non-finite entries");
    }
}

double operator_norm(const Matrix& m) {
    if (!m.allFinite()) {
        throw InvalidInput("operator_norm: matrix has non-finite entries");
    }
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

Matrix commutator(const Matrix& m, const Matrix& n) {
    if (m.rows() != n.rows() || m.cols() != n.cols() || m.rows() != m.cols()) {
        throw InvalidInput("commutator: dimension mismatch");
    }
    return m * n - n * m;
}

double unitarity_defect(const Matrix& m) {
    require_square_finite(m, "unitarity_defect");
    return operator_norm(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols()));
}

double hermiticity_defect(const Matrix& m) {
    require_square_finite(m, "hermiticity_defect");
    return operator_norm(m - m.adjoint());
}

HermitianMatrix::HermitianMatrix(Matrix m, double tol) : m_(std::move(m)) {
    defect_ = hermiticity_defect(m_);
    if (defect_ > tol) {
        std::ostringstream os;
        os << "HermitianMatrix: hermiticity defect " << defect_ << " exceeds tolerance " << tol;
        throw InvalidInput(os.str());
    }
}

HermitianMatrix::HermitianMatrix(Matrix m)
    : HermitianMatrix(m, Tolerances::for_dimension(m.rows()).hermiticity) {}

UnitaryMatrix::UnitaryMatrix(Matrix m, double tol) : m_(std::move(m)) {
    defect_ = unitarity_defect(m_);
    if (defect_ > tol) {
        std::ostringstream os;
        os << "UnitaryMatrix: unitarity defect " << defect_ << " exceeds tolerance " << tol;
        throw InvalidInput(os.str());
    }
}

UnitaryMatrix::UnitaryMatrix(Matrix m)
    : UnitaryMatrix(m, Tolerances::for_dimension(m.rows()).unitarity) {}

UnitaryMatrix herm_exp(const HermitianMatrix& h) {
    const Matrix& a = h.matrix();
    const Index n = a.rows();
    // The solver reads one triangle only; symmetrize so both contribute.
    const Matrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw NumericalError("herm_exp: eigendecomposition did not converge");
    }
    const Matrix& q = es.eigenvectors();
    const Eigen::VectorXd& lambda = es.eigenvalues();

    const double residual = operator_norm(sym * q - q * lambda.cast<Complex>().asDiagonal());
    const double scale = std::max(1.0, operator_norm(sym));
    if (residual > 1e-10 * static_cast<double>(n) * scale) {
        std::ostringstream os;
        os << "herm_exp: eigendecomposition residual " << residual << " too large";
        throw NumericalError(os.str());
    }

    Eigen::VectorXcd phases(n);
    for (Index j = 0; j < n; ++j) phases(j) = std::polar(1.0, lambda(j));
    Matrix u = q * phases.asDiagonal() * q.adjoint();
    return UnitaryMatrix(std::move(u));
}

} // namespace nearcommute
