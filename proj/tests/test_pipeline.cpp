#include <doctest.h>

#include "nearcommute/errors.hpp"
#include "nearcommute/pipeline.hpp"
#include "nearcommute/spectral.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace nearcommute;

namespace {

// Commuting base pair on a shared random basis, angles in (gap, 2 pi - gap),
// then U <- e^{i delta G} U.
std::pair<Matrix, Matrix> almost_commuting(oracle::TestRng& rng, Index n, double gap, double delta) {
    const Matrix w = rng.unitary(n);
    Eigen::VectorXcd du(n), dv(n);
    for (Index j = 0; j < n; ++j) {
        du(j) = std::polar(1.0, rng.uniform(gap, oracle::kTwoPi - gap));
        dv(j) = std::polar(1.0, rng.uniform(gap, oracle::kTwoPi - gap));
    }
    Matrix u = w * du.asDiagonal() * w.adjoint();
    const Matrix v = w * dv.asDiagonal() * w.adjoint();
    if (delta > 0.0) {
        Matrix g = rng.hermitian(n);
        g /= oracle::power_norm(g);
        u = herm_exp(HermitianMatrix(delta * g)).matrix() * u;
    }
    return {u, v};
}

} // namespace

TEST_CASE("log_commutator_bound: Leibniz sums") {
    const LaurentCoefficients cu = smoothed_coefficients(1.0, 0.5, 50);
    const LaurentCoefficients cv = smoothed_coefficients(1.0, 0.25, 80);
    double su = 0.0, sv = 0.0;
    for (int k = -50; k <= 50; ++k) su += std::abs(k) * std::abs(cu.at(k));
    for (int k = -80; k <= 80; ++k) sv += std::abs(k) * std::abs(cv.at(k));
    const BoundReport r = log_commutator_bound(cu, cv, 1e-3);
    CHECK(r.sum_u == doctest::Approx(su).epsilon(1e-13));
    CHECK(r.sum_v == doctest::Approx(sv).epsilon(1e-13));
    CHECK(r.alpha_emp == doctest::Approx(su * sv).epsilon(1e-13));
    CHECK(r.predicted == doctest::Approx(1e-3 * su * sv).epsilon(1e-13));
    CHECK_THROWS_AS(log_commutator_bound(cu, cv, -1.0), InvalidInput);
}

TEST_CASE("log_commutator_bound: alpha scales like 1/gamma in each factor") {
    // sum |k||c_k| = 2 sum |X(gamma k)| is a Riemann sum for (2/gamma) int |X|.
    const LaurentCoefficients fixed = smoothed_coefficients(oracle::kPi, 1.0, 2000);
    std::vector<double> xs, ys;
    for (double gamma : {0.1, 0.2, 0.4, 0.8}) {
        const LaurentCoefficients c = smoothed_coefficients(oracle::kPi, gamma, 2000);
        const BoundReport r = log_commutator_bound(c, fixed, 1.0);
        xs.push_back(std::log(gamma));
        ys.push_back(std::log(r.sum_u));
    }
    const double slope = (ys.back() - ys.front()) / (xs.back() - xs.front());
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("pipeline: commuting inputs are returned unchanged") {
    oracle::TestRng rng(51);
    for (Index n : {2, 8, 16}) {
        const auto [u, v] = almost_commuting(rng, n, 0.8, 0.0);
        const PipelineResult r = near_commuting_unitaries(UnitaryMatrix(u), UnitaryMatrix(v));
        CHECK(r.checks.all());
        CHECK(r.dist_u + r.dist_v <= 1e-6);
        CHECK(r.comm_after <= 1e-10 * n);
    }
}

TEST_CASE("pipeline: almost commuting inputs") {
    oracle::TestRng rng(53);
    for (double delta : {1e-1, 1e-2, 1e-3}) {
        const Index n = 12;
        const auto [u, v] = almost_commuting(rng, n, 1.0, delta);
        const PipelineResult r = near_commuting_unitaries(UnitaryMatrix(u), UnitaryMatrix(v));
        CHECK(r.checks.all());
        CHECK(r.comm_after <= 1e-10 * n);
        CHECK(unitarity_defect(r.x.matrix()) <= 1e-8 * n);
        CHECK(unitarity_defect(r.y.matrix()) <= 1e-8 * n);
        CHECK(r.comm_before == doctest::Approx(operator_norm(commutator(u, v))).epsilon(1e-14));
        // Independently recomputed distances.
        CHECK(r.dist_u == doctest::Approx(oracle::power_norm(u - r.x.matrix())).epsilon(1e-6));
        CHECK(r.dist_v == doctest::Approx(oracle::power_norm(v - r.y.matrix())).epsilon(1e-6));
        CHECK(r.bound.holds());
        CHECK(r.checks.exp_gap_u <= r.herm_dist_a + 1e-10 * n);
        CHECK(r.checks.exp_gap_v <= r.herm_dist_b + 1e-10 * n);
        CHECK(r.checks.normalization_roundtrip <= 1e-13 * n);
        CHECK(r.tail_u <= 1e-6);
        CHECK(r.gamma_u == doctest::Approx(0.5 * r.bound.delta1));
    }
}

TEST_CASE("pipeline: phases are undone") {
    oracle::TestRng rng(57);
    auto [u, v] = almost_commuting(rng, 6, 1.0, 1e-3);
    // Rotate U's gap away from 0.
    u *= std::polar(1.0, 2.0);
    const PipelineResult r = near_commuting_unitaries(UnitaryMatrix(u), UnitaryMatrix(v));
    CHECK(r.checks.all());
    CHECK(r.dist_u < 1e-2);
}

TEST_CASE("pipeline: rejects small gaps") {
    // Clock and shift: every gap half-width is pi/n.
    const Index n = 16;
    Matrix clock = Matrix::Zero(n, n), shift = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        clock(j, j) = std::polar(1.0, oracle::kTwoPi * j / n);
        shift((j + 1) % n, j) = 1.0;
    }
    PipelineOptions opts;
    opts.min_gap = 0.3;
    try {
        near_commuting_unitaries(UnitaryMatrix(clock), UnitaryMatrix(shift), opts);
        FAIL("expected GapTooSmall");
    } catch (const GapTooSmall& e) {
        CHECK(e.gap_first() == doctest::Approx(oracle::kPi / n));
        CHECK(e.gap_second() == doctest::Approx(oracle::kPi / n));
    }
    CHECK_THROWS_AS(near_commuting_unitaries(UnitaryMatrix(clock), UnitaryMatrix(Matrix::Identity(3, 3))),
                    InvalidInput);
}

TEST_CASE("pipeline: report formats") {
    oracle::TestRng rng(59);
    const auto [u, v] = almost_commuting(rng, 4, 1.0, 1e-3);
    const PipelineResult r = near_commuting_unitaries(UnitaryMatrix(u), UnitaryMatrix(v));
    const std::string kv = to_key_value(r);
    CHECK(kv.find("dist_u=") == 0);
    CHECK(kv.find("\nchecks_passed=1\n") != std::string::npos);
    const std::string header = pipeline_csv_header();
    const std::string row = to_csv_row(r);
    auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(commas(header) == commas(row));
}
