// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "opmeans/means.hpp"
#include "opmeans/random_instances.hpp"

using namespace opmeans;

namespace {

HpdMatrix scalar(double v) { return HpdMatrix(Eigen::MatrixXd::Constant(1, 1, v)); }

DiscreteMeasure one_nine() {
    return DiscreteMeasure({scalar(1.0), scalar(9.0)}, {Rational(1, 2), Rational(1, 2)});
}

// Closed form for the scalar power mean: (sum of w_i a_i^r)^(1/r).
double scalar_power_mean(double r, const std::vector<double>& w, const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(a[i], r);
    return std::pow(s, 1.0 / r);
}

// Geodesic midpoint A # B, written out directly from its closed form.
HpdMatrix geodesic_midpoint(const HpdMatrix& a, const HpdMatrix& b) {
    const HpdMatrix rt = matrix_sqrt(a);
    const HpdMatrix irt = matrix_inv(rt);
    const HpdMatrix inner(Eigen::MatrixXd(irt.mat() * b.mat() * irt.mat()));
    const HpdMatrix mid = matrix_sqrt(inner);
    return HpdMatrix(Eigen::MatrixXd(rt.mat() * mid.mat() * rt.mat()));
}

// Karcher gradient at x: integral of log(x^{-1/2} A x^{-1/2}).
double karcher_residual(const HpdMatrix& x, const DiscreteMeasure& mu) {
    const HpdMatrix ix = matrix_power(x, -0.5);
    const Eigen::MatrixXd s = integrate_sym(mu, [&](const HpdMatrix& a) {
        Eigen::MatrixXd w = ix.mat() * a.mat() * ix.mat();
        w = ((w + w.transpose()) / 2.0).eval();
        return matrix_log(HpdMatrix(w));
    });
    return sym_operator_norm(s);
}

} // namespace

TEST_CASE("closed-form means take their textbook values on {1, 9}") {
    const DiscreteMeasure mu = one_nine();
    CHECK(arithmetic_mean(mu)(0, 0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(harmonic_mean(mu)(0, 0) == doctest::Approx(1.8).epsilon(1e-14));
    CHECK(log_euclidean_mean(mu)(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(karcher_mean(mu).value(0, 0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(power_mean(0.5, mu).value(0, 0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(power_mean(-0.5, mu).value(0, 0) == doctest::Approx(2.25).epsilon(1e-10));
}

TEST_CASE("power mean reproduces the scalar closed form across the exponent range") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> val(0.2, 6.0);
    // 1/16 is below the small-exponent switch, so both solver branches run.
    for (double r : {1.0, 0.5, 0.25, 1.0 / 16.0, -1.0 / 16.0, -0.25, -0.5, -1.0}) {
        for (int rep = 0; rep < 4; ++rep) {
            const std::vector<double> a = {val(rng), val(rng), val(rng)};
            const DiscreteMeasure mu({scalar(a[0]), scalar(a[1]), scalar(a[2])},
                                     {Rational(1, 6), Rational(1, 3), Rational(1, 2)});
            const double oracle =
                scalar_power_mean(r, {1.0 / 6.0, 1.0 / 3.0, 1.0 / 2.0}, a);
            CHECK(power_mean(r, mu).value(0, 0) == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(power_mean(0.0, one_nine()), ParamOutOfRange);
    CHECK_THROWS_AS(power_mean(1.5, one_nine()), ParamOutOfRange);
    CHECK_THROWS_AS(power_mean(-1.01, one_nine()), ParamOutOfRange);
}

TEST_CASE("power means at the endpoints coincide with arithmetic and harmonic") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 4; ++rep) {
        const DiscreteMeasure mu = random_measure(3, 3, 0.1, rng);
        CHECK(thompson_distance(power_mean(1.0, mu).value, arithmetic_mean(mu)) <= 1e-9);
        CHECK(thompson_distance(power_mean(-1.0, mu).value, harmonic_mean(mu)) <= 1e-9);
    }
}

TEST_CASE("two-atom barycenter is the geodesic midpoint") {
    std::mt19937_64 rng(53);
    for (int rep = 0; rep < 5; ++rep) {
        const HpdMatrix a = random_hpd(3, 0.1, rng);
        const HpdMatrix b = random_hpd(3, 0.1, rng);
        const DiscreteMeasure mu = DiscreteMeasure::uniform({a, b});
        const HpdMatrix expect = geodesic_midpoint(a, b);
        CHECK(thompson_distance(karcher_mean(mu).value, expect) <= 1e-8);
    }
}

TEST_CASE("barycenter of a commuting family is the entrywise geometric mean") {
    std::mt19937_64 rng(59);
    const Eigen::MatrixXd q = random_orthogonal(3, rng);
    std::uniform_real_distribution<double> val(0.3, 4.0);
    std::vector<HpdMatrix> atoms;
    Eigen::VectorXd geo = Eigen::VectorXd::Ones(3);
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd lam(3);
        for (int k = 0; k < 3; ++k) lam(k) = val(rng);
        geo = geo.cwiseProduct(lam.array().pow(1.0 / 3.0).matrix());
        atoms.emplace_back(Eigen::MatrixXd(q * lam.asDiagonal() * q.transpose()));
    }
    const HpdMatrix expect(Eigen::MatrixXd(q * geo.asDiagonal() * q.transpose()));
    const HpdMatrix got = karcher_mean(DiscreteMeasure::uniform(atoms)).value;
    CHECK(thompson_distance(got, expect) <= 1e-9);
}

TEST_CASE("barycenter residual vanishes at the returned point") {
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 4; ++rep) {
        const DiscreteMeasure mu = random_measure(3, 3, 0.05, rng);
        SolverConfig cfg;
        const SolveResult res = karcher_mean(mu, cfg);
        CHECK(karcher_residual(res.value, mu) <= cfg.residual_tol);
        CHECK(res.trace.status == SolveStatus::Converged);
    }
}

TEST_CASE("power-mean limit brackets the barycenter with shrinking widths") {
    std::mt19937_64 rng(67);
    const DiscreteMeasure mu = random_measure(2, 3, 0.1, rng);
    const PowerLimitReport rep = karcher_via_power_limit(mu);
    CHECK(rep.monotone_ok);
    REQUIRE(!rep.rows.empty());
    CHECK(rep.rows.back().width < rep.rows.front().width);
    CHECK(thompson_distance(rep.value, karcher_mean(mu).value) <= 1e-6);
    CHECK_THROWS_AS(karcher_via_power_limit(mu, {0.5, 0.5}), ParamOutOfRange);
    CHECK_THROWS_AS(karcher_via_power_limit(mu, {2.0}), ParamOutOfRange);
}

TEST_CASE("deformed arithmetic means decrease to the harmonic mean") {
    std::mt19937_64 rng(71);
    const DiscreteMeasure mu = random_measure(2, 2, 0.2, rng);
    const HarmonicLimitReport rep = harmonic_limit_check(mu);
    CHECK(rep.monotone_ok);
    CHECK(rep.terminal_ok);
    CHECK(rep.c_hat >= 0.0);
    REQUIRE(rep.rows.size() >= 2);
    CHECK(rep.rows.back().gap <= rep.rows.front().gap + 1e-12);
    CHECK_THROWS_AS(harmonic_limit_check(mu, {0.25, 0.5}), ParamOutOfRange);
}

TEST_CASE("means are congruence- and inversion-compatible on random instances") {
    std::mt19937_64 rng(73);
    const DiscreteMeasure mu = random_measure(3, 2, 0.1, rng);
    const Eigen::MatrixXd t = random_invertible(3, rng);

    // The barycenter transforms by congruence.
    const HpdMatrix direct = karcher_mean(pf_congruence(mu, t)).value;
    const HpdMatrix moved(Eigen::MatrixXd(t * karcher_mean(mu).value.mat() * t.transpose()));
    CHECK(thompson_distance(direct, moved) <= 1e-7);

    // P_{-r}(mu) is the inverse of P_r applied to the inverted measure.
    const HpdMatrix lhs = power_mean(-0.5, mu).value;
    const HpdMatrix rhs = matrix_inv(power_mean(0.5, pf_inverse(mu)).value);
    CHECK(thompson_distance(lhs, rhs) <= 1e-8);
}
