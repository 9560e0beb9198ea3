#include <doctest.h>

#include "nearcommute/errors.hpp"
#include "nearcommute/spectral.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace nearcommute;

namespace {

Matrix diag_phases(const std::vector<double>& angles) {
    Matrix m = Matrix::Zero(static_cast<Index>(angles.size()), static_cast<Index>(angles.size()));
    for (std::size_t j = 0; j < angles.size(); ++j) m(j, j) = std::polar(1.0, angles[j]);
    return m;
}

// Brute force: sample the circle finely, find the longest run of points whose
// distance to every angle exceeds the step. Independent of the sort-and-scan.
double brute_largest_half_width(const std::vector<double>& angles) {
    const int samples = 200000;
    const double step = oracle::kTwoPi / samples;
    std::vector<char> empty(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = i * step;
        bool free = true;
        for (double a : angles) {
            double d = std::abs(std::remainder(t - a, oracle::kTwoPi));
            if (d < step) free = false;
        }
        empty[i] = free;
    }
    int best = 0;
    for (int start = 0; start < samples; ++start) {
        if (empty[start] && !empty[(start + samples - 1) % samples]) {
            int len = 0;
            while (len < samples && empty[(start + len) % samples]) ++len;
            best = std::max(best, len);
        }
    }
    return 0.5 * (best + 1) * step;
}

} // namespace

TEST_CASE("angle helpers") {
    CHECK(normalize_angle(-0.5) == doctest::Approx(oracle::kTwoPi - 0.5));
    CHECK(normalize_angle(7.0) == doctest::Approx(7.0 - oracle::kTwoPi));
    CHECK(normalize_angle(oracle::kTwoPi - 1e-14) == 0.0);
    CHECK(wrap_angle(oracle::kPi) == doctest::Approx(oracle::kPi));
    CHECK(wrap_angle(-oracle::kPi) == doctest::Approx(oracle::kPi));
    CHECK(wrap_angle(4.0) == doctest::Approx(4.0 - oracle::kTwoPi));
}

TEST_CASE("unitary_eigensystem: diagonal") {
    const std::vector<double> angles{0.3, 5.0, 2.0};
    const Eigensystem es = unitary_eigensystem(UnitaryMatrix(diag_phases(angles)));
    REQUIRE(es.angles.size() == 3);
    CHECK(es.angles[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(es.angles[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(es.angles[2] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK((es.reconstruct() - diag_phases(angles)).norm() < 1e-14);
}

TEST_CASE("unitary_eigensystem: random unitaries") {
    oracle::TestRng rng(21);
    for (Index n : {1, 2, 5, 16, 40}) {
        const Matrix w = rng.unitary(n);
        const Eigensystem es = unitary_eigensystem(UnitaryMatrix(w));
        CHECK(std::is_sorted(es.angles.begin(), es.angles.end()));
        for (double a : es.angles) {
            CHECK(a >= 0.0);
            CHECK(a < oracle::kTwoPi);
        }
        CHECK(unitarity_defect(es.basis) < 1e-12 * n);
        CHECK(operator_norm(es.reconstruct() - w) < 1e-12 * n);
        // Each column is an eigenvector for its angle.
        for (Index j = 0; j < n; ++j) {
            const Eigen::VectorXcd v = es.basis.col(j);
            CHECK((w * v - std::polar(1.0, es.angles[static_cast<std::size_t>(j)]) * v).norm() < 1e-12 * n);
        }
    }
}

TEST_CASE("unitary_eigensystem: rejects a non-unitary") {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 0) = 1.001;
    CHECK_THROWS_AS(unitary_eigensystem(UnitaryMatrix(m, 1.0)), InvalidInput);
}

TEST_CASE("largest_gap: hand examples") {
    SUBCASE("single angle has the whole circle") {
        const std::vector<double> a{1.0};
        const GapInfo g = largest_gap(a);
        CHECK(g.half_width == doctest::Approx(oracle::kPi));
        CHECK(g.center == doctest::Approx(1.0 + oracle::kPi));
    }
    SUBCASE("two angles") {
        const std::vector<double> a{0.0, 1.0};
        const GapInfo g = largest_gap(a);
        CHECK(g.half_width == doctest::Approx((oracle::kTwoPi - 1.0) / 2));
        CHECK(g.center == doctest::Approx(0.5 + oracle::kPi));
        CHECK(g.lo == doctest::Approx(1.0));
        CHECK(g.hi == doctest::Approx(0.0));
    }
    SUBCASE("gap wrapping through zero") {
        const std::vector<double> a{0.5, 1.5, 2.5, 3.5, 4.5, 5.5};
        const GapInfo g = largest_gap(a);
        const double width = oracle::kTwoPi - 5.5 + 0.5;
        CHECK(g.half_width == doctest::Approx(width / 2));
        CHECK(g.center == doctest::Approx(normalize_angle(5.5 + width / 2)));
    }
    SUBCASE("ties go to the smallest center") {
        // Four equally spaced angles give four equal arcs; centers pi/4, 3pi/4, ...
        const std::vector<double> a{0.0, oracle::kPi / 2, oracle::kPi, 3 * oracle::kPi / 2};
        const GapInfo g = largest_gap(a);
        CHECK(g.half_width == doctest::Approx(oracle::kPi / 4));
        CHECK(g.center == doctest::Approx(oracle::kPi / 4));
    }
    SUBCASE("degenerate angles") {
        const std::vector<double> a{2.0, 2.0, 2.0};
        CHECK(largest_gap(a).half_width == doctest::Approx(oracle::kPi));
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS(largest_gap(std::vector<double>{}), InvalidInput);
    }
}

TEST_CASE("largest_gap: agrees with a brute-force scan") {
    oracle::TestRng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> angles;
        const int m = 2 + trial;
        for (int j = 0; j < m; ++j) angles.push_back(rng.uniform(0.0, oracle::kTwoPi));
        const double expected = brute_largest_half_width(angles);
        CHECK(std::abs(largest_gap(angles).half_width - expected) < 1e-4);
    }
}

TEST_CASE("gap_at_zero") {
    const std::vector<double> a{0.5, 3.0, 6.0};
    CHECK(gap_at_zero(a) == doctest::Approx(oracle::kTwoPi - 6.0));
}

TEST_CASE("center_gap") {
    SUBCASE("diag(1, i)") {
        const CenteredUnitary c = center_gap(UnitaryMatrix(diag_phases({0.0, oracle::kPi / 2})));
        // Widest arc runs from pi/2 to 2 pi, centered at 5 pi/4.
        CHECK(c.phase == doctest::Approx(-3 * oracle::kPi / 4));
        CHECK(c.gap.center == 0.0);
        CHECK(c.gap.half_width == doctest::Approx(3 * oracle::kPi / 4));
        CHECK(gap_at_zero(c.eigen.angles) == doctest::Approx(3 * oracle::kPi / 4));
        const Matrix back = std::polar(1.0, c.phase) * c.matrix.matrix();
        CHECK((back - diag_phases({0.0, oracle::kPi / 2})).norm() < 1e-15);
    }
    SUBCASE("random: gap is centred and idempotent") {
        oracle::TestRng rng(9);
        for (int trial = 0; trial < 10; ++trial) {
            const Index n = 2 + 3 * trial;
            const Matrix w = rng.unitary(n);
            const CenteredUnitary c = center_gap(UnitaryMatrix(w));
            CHECK(c.phase > -oracle::kPi);
            CHECK(c.phase <= oracle::kPi);
            CHECK(c.gap.center == 0.0);
            CHECK(c.gap.half_width == doctest::Approx(largest_gap(unitary_eigensystem(UnitaryMatrix(w))).half_width));
            // The rotated spectrum avoids (-half_width, half_width).
            CHECK(gap_at_zero(unitary_eigensystem(c.matrix).angles) ==
                  doctest::Approx(c.gap.half_width).epsilon(1e-10));
            const CenteredUnitary again = center_gap(c.matrix);
            CHECK(std::abs(again.phase) < 1e-10);
            CHECK(operator_norm(std::polar(1.0, c.phase) * c.matrix.matrix() - w) < 1e-13 * n);
        }
    }
}
