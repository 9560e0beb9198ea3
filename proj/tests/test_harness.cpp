#include <doctest.h>

#include "nearcommute/errors.hpp"
#include "nearcommute/harness.hpp"
#include "nearcommute/spectral.hpp"
#include "oracles.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <string>

using namespace nearcommute;

TEST_CASE("derive_seed is deterministic and spreads streams") {
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t t = 0; t < 256; ++t) seen.insert(derive_seed(s, t));
    CHECK(seen.size() == 1024);
}

TEST_CASE("Rng moments") {
    Rng rng(7);
    const int n = 200000;
    double mu = 0, m2 = 0, umin = 1, umax = 0, cz = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        mu += x;
        m2 += x * x;
        const double u = rng.uniform();
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        cz += std::norm(rng.complex_normal());
    }
    CHECK(std::abs(mu / n) < 0.01);
    CHECK(std::abs(m2 / n - 1.0) < 0.02);
    CHECK(umin > 0.0);
    CHECK(umax < 1.0);
    CHECK(std::abs(cz / n - 1.0) < 0.02);
}

TEST_CASE("haar_unitary and unit_hermitian") {
    Rng rng(3);
    for (Index n : {1, 4, 32}) {
        CHECK(unitarity_defect(haar_unitary(n, rng)) < 1e-13 * n);
        const Matrix h = unit_hermitian(n, rng);
        CHECK(hermiticity_defect(h) == 0.0);
        CHECK(operator_norm(h) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Mean of |U_00|^2 over Haar measure is 1/n.
    const Index n = 4;
    double acc = 0.0;
    const int draws = 4000;
    for (int i = 0; i < draws; ++i) acc += std::norm(haar_unitary(n, rng)(0, 0));
    CHECK(acc / draws == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("gen_gapped_unitary") {
    for (double gap : {0.3, 1.0, 2.0}) {
        const UnitaryMatrix u = gen_gapped_unitary(24, gap, 99);
        CHECK(u.defect() < 1e-12 * 24);
        CHECK(gap_at_zero(unitary_eigensystem(u).angles) >= gap - 1e-12);
        CHECK((gen_gapped_unitary(24, gap, 99).matrix() - u.matrix()).norm() == 0.0);
    }
    CHECK_THROWS_AS(gen_gapped_unitary(0, 1.0, 1), InvalidInput);
    CHECK_THROWS_AS(gen_gapped_unitary(4, 3.5, 1), InvalidInput);
}

TEST_CASE("gen_almost_commuting_pair") {
    SUBCASE("commutator scales with eps") {
        for (double eps : {1e-1, 1e-3}) {
            const AlmostCommutingPair p = gen_almost_commuting_pair(16, 1.0, eps, 5);
            CHECK(p.eps_actual == doctest::Approx(oracle::power_norm(commutator(p.u.matrix(), p.v.matrix())))
                                      .epsilon(1e-8));
            CHECK(p.eps_actual <= 2.0 * eps + 1e-14);
            CHECK(p.eps_actual > 0.01 * eps);
            CHECK(p.gap_u >= 0.5);
            CHECK(p.gap_v >= 0.5);
        }
    }
    SUBCASE("eps = 0 gives a commuting pair") {
        const AlmostCommutingPair p = gen_almost_commuting_pair(16, 1.0, 0.0, 5);
        CHECK(p.eps_actual <= 1e-13);
    }
    SUBCASE("same seed, same pair; base pair shared across eps") {
        const AlmostCommutingPair a = gen_almost_commuting_pair(8, 1.0, 1e-2, 11);
        const AlmostCommutingPair b = gen_almost_commuting_pair(8, 1.0, 1e-2, 11);
        CHECK((a.u.matrix() - b.u.matrix()).norm() == 0.0);
        const AlmostCommutingPair c = gen_almost_commuting_pair(8, 1.0, 1e-4, 11);
        CHECK((a.v.matrix() - c.v.matrix()).norm() == 0.0);
    }
    CHECK_THROWS_AS(gen_almost_commuting_pair(4, 1.0, -1.0, 1), InvalidInput);
}

TEST_CASE("gen_voiculescu_pair") {
    for (Index n : {2, 4, 8, 16, 64}) {
        const auto [c, s] = gen_voiculescu_pair(n);
        const double comm = oracle::power_norm(commutator(c.matrix(), s.matrix()));
        CHECK(std::abs(comm - 2.0 * std::sin(oracle::kPi / n)) < 1e-12);
        CHECK(largest_gap(unitary_eigensystem(c)).half_width == doctest::Approx(oracle::kPi / n));
        CHECK(largest_gap(unitary_eigensystem(s)).half_width == doctest::Approx(oracle::kPi / n));
    }
    CHECK_THROWS_AS(gen_voiculescu_pair(1), InvalidInput);
}

TEST_CASE("statistics helpers") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(std::isnan(median({})));
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // Ties get average ranks: ranks of y are 1.5, 1.5, 3, 4.
    const double r = spearman({1, 2, 3, 4}, {5, 5, 6, 7});
    CHECK(r == doctest::Approx(0.9486832980505138));
    CHECK_THROWS_AS(spearman({1}, {1}), InvalidInput);

    const auto e = log_spaced(1e-1, 1e-4, 4);
    REQUIRE(e.size() == 4);
    CHECK(e[0] == 1e-1);
    CHECK(e[1] == doctest::Approx(1e-2));
    CHECK(e[2] == doctest::Approx(1e-3));
    CHECK(e[3] == 1e-4);
}

TEST_CASE("experiment config validation") {
    ExperimentConfig c;
    c.epsilons = {1e-2, 1e-3, 0.0};
    CHECK_NOTHROW(c.validate());
    c.epsilons = {1e-3, 1e-2};
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c.epsilons = {};
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c.epsilons = {1e-2};
    c.threads = 0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("sweep: records, CSV and thread independence") {
    ExperimentConfig c;
    c.n = 6;
    c.delta = 1.0;
    c.epsilons = {1e-2, 1e-3};
    c.trials = 3;
    c.seed = 42;
    const auto serial = run_sweep(c);
    c.threads = 3;
    const auto parallel = run_sweep(c);
    REQUIRE(serial.size() == 6);
    std::ostringstream a, b;
    write_sweep_csv(a, serial, "");
    write_sweep_csv(b, parallel, "");
    CHECK(a.str() == b.str());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].status == "ok");
        CHECK(serial[i].eps_target == c.epsilons[i / 3]);
        CHECK(serial[i].seed == derive_seed(42, i % 3));
    }

    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == trial_csv_header());
    std::ostringstream stamped;
    write_sweep_csv(stamped, serial, "2024-01-01T00:00:00Z");
    CHECK(stamped.str().rfind("# generated 2024-01-01T00:00:00Z\n", 0) == 0);

    const SweepSummary s = summarize(serial);
    REQUIRE(s.per_epsilon.size() == 2);
    CHECK(s.per_epsilon[0].accepted == 3);
    CHECK(s.per_epsilon[0].median_dist >= s.per_epsilon[1].median_dist);
}

TEST_CASE("run_trial classifies rejections") {
    ExperimentConfig c;
    c.n = 32;
    c.delta = 0.2;
    c.min_gap = 1.5;
    c.epsilons = {1e-3};
    const TrialOutcome o = run_trial(c, 0, 0);
    CHECK(o.record.status == "rejected");
    CHECK(!o.result);
    CHECK(!o.error.empty());
}
