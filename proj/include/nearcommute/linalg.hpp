#pragma once

// Dense complex matrices, operator norm, commutators and the Hermitian
// exponential. Everything here is a pure function over values.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace nearcommute {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

// Numerical tolerances. The structural ones scale with the dimension n.
struct Tolerances {
    double unitarity = 1e-8;
    double hermiticity = 1e-8;
    double commute = 1e-10;
    double series_target = 1e-6;

    static Tolerances for_dimension(Index n);
    // Throws InvalidInput unless every field is strictly positive.
    void validate() const;
};

// Throws InvalidInput for non-square, empty, or non-finite input.
void require_square_finite(const Matrix& m, const char* what);

/// Spectral norm: the largest singular value.
double operator_norm(const Matrix& m);

/// MN - NM.
Matrix commutator(const Matrix& m, const Matrix& n);

/// ||M^dagger M - I||
double unitarity_defect(const Matrix& m);
/// ||M - M^dagger||
double hermiticity_defect(const Matrix& m);

class HermitianMatrix {
public:
    // Checked construction; throws InvalidInput if the hermiticity defect exceeds tol.
    HermitianMatrix(Matrix m, double tol);
    // Checked against Tolerances::for_dimension(n).hermiticity.
    explicit HermitianMatrix(Matrix m);

    const Matrix& matrix() const noexcept { return m_; }
    double defect() const noexcept { return defect_; }
    Index dim() const noexcept { return m_.rows(); }

private:
    Matrix m_;
    double defect_;
};

class UnitaryMatrix {
public:
    UnitaryMatrix(Matrix m, double tol);
    explicit UnitaryMatrix(Matrix m);

    const Matrix& matrix() const noexcept { return m_; }
    double defect() const noexcept { return defect_; }
    Index dim() const noexcept { return m_.rows(); }

private:
    Matrix m_;
    double defect_;
};

/// e^{iH} via the eigendecomposition of H. The result's eigenangles are the
/// eigenvalues of H modulo 2*pi.
UnitaryMatrix herm_exp(const HermitianMatrix& h);

} // namespace nearcommute
