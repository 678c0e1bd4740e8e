// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <random>

#include "opmeans/measure.hpp"
#include "opmeans/random_instances.hpp"

using namespace opmeans;

namespace {

HpdMatrix diag2(double a, double b) {
    Eigen::MatrixXd d(2, 2);
    d << a, 0, 0, b;
    return HpdMatrix(d);
}

HpdMatrix scalar(double v) { return HpdMatrix(Eigen::MatrixXd::Constant(1, 1, v)); }

} // namespace

TEST_CASE("measure construction enforces the probability contract") {
    CHECK_THROWS_AS(DiscreteMeasure({}, {}), EmptyInput);
    CHECK_THROWS_AS(DiscreteMeasure({scalar(1.0)}, {Rational(1, 2), Rational(1, 2)}),
                    LengthMismatch);
    CHECK_THROWS_AS(DiscreteMeasure({scalar(1.0), diag2(1, 2)}, {Rational(1, 2), Rational(1, 2)}),
                    DimensionMismatch);
    CHECK_THROWS_AS(DiscreteMeasure({scalar(1.0), scalar(2.0)}, {Rational(3, 2), Rational(-1, 2)}),
                    ParamOutOfRange); // negative weight
    CHECK_THROWS_AS(DiscreteMeasure({scalar(1.0), scalar(2.0)}, {Rational(1, 2), Rational(1, 3)}),
                    ParamOutOfRange); // sums to 5/6

    const DiscreteMeasure mu({scalar(1.0), scalar(9.0)}, {Rational(1, 2), Rational(1, 2)});
    CHECK(mu.size() == 2);
    CHECK(mu.dim() == 1);
    CHECK(mu.weight(0) == Rational(1, 2));
    CHECK(mu.weight_double(1) == doctest::Approx(0.5));

    const DiscreteMeasure point = DiscreteMeasure::dirac(diag2(1, 2));
    CHECK(point.size() == 1);
    CHECK(point.weight(0) == Rational(1));

    const DiscreteMeasure unif = DiscreteMeasure::uniform({scalar(1), scalar(2), scalar(3)});
    CHECK(unif.weight(2) == Rational(1, 3));
    CHECK_THROWS_AS(DiscreteMeasure::uniform({}), EmptyInput);
}

TEST_CASE("scale, inverse and power pushforwards act atomwise") {
    const DiscreteMeasure mu({diag2(1, 4), diag2(2, 8)}, {Rational(1, 4), Rational(3, 4)});

    const DiscreteMeasure sc = pf_scale(mu, 3.0);
    CHECK(sc.atom(0)(1, 1) == doctest::Approx(12.0));
    CHECK(sc.weight(1) == Rational(3, 4)); // weights untouched
    CHECK_THROWS_AS(pf_scale(mu, 0.0), ParamOutOfRange);
    CHECK_THROWS_AS(pf_scale(mu, -1.0), ParamOutOfRange);

    const DiscreteMeasure inv = pf_inverse(mu);
    CHECK(inv.atom(0)(0, 0) == doctest::Approx(1.0));
    CHECK(inv.atom(0)(1, 1) == doctest::Approx(0.25));

    const DiscreteMeasure pw = pf_power(mu, 0.5);
    CHECK(pw.atom(1)(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(pw.atom(1)(1, 1) == doctest::Approx(std::sqrt(8.0)));
    CHECK_THROWS_AS(pf_power(mu, 0.0), ParamOutOfRange);
}

TEST_CASE("congruence pushforward conjugates every atom") {
    std::mt19937_64 rng(7);
    const DiscreteMeasure mu = random_measure(3, 2, 0.2, rng);
    const Eigen::MatrixXd t = random_invertible(3, rng);
    const DiscreteMeasure conj = pf_congruence(mu, t);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const Eigen::MatrixXd expect = t * mu.atom(i).mat() * t.transpose();
        CHECK((conj.atom(i).mat() - expect).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK_THROWS_AS(pf_congruence(mu, Eigen::MatrixXd::Zero(3, 3)), ParamOutOfRange);
    CHECK_THROWS_AS(pf_congruence(mu, Eigen::MatrixXd::Identity(2, 2)), DimensionMismatch);
}

TEST_CASE("structured pushforwards: eigenvalues, determinant root, zip") {
    std::mt19937_64 rng(8);
    const DiscreteMeasure mu = random_measure(3, 2, 0.1, rng);

    const DiscreteMeasure diag = pf_eigenvalues(mu);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto& vals = mu.atom(i).eigenvalues();
        for (Eigen::Index k = 0; k < 3; ++k) {
            CHECK(diag.atom(i)(k, k) == doctest::Approx(vals(k)).epsilon(1e-12));
        }
        CHECK(diag.atom(i)(0, 1) == doctest::Approx(0.0));
        CHECK(diag.atom(i)(0, 0) >= diag.atom(i)(2, 2));
    }

    const DiscreteMeasure dr = pf_det_root(mu);
    CHECK(dr.dim() == 1);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto& vals = mu.atom(i).eigenvalues();
        const double expect = std::cbrt(vals(0) * vals(1) * vals(2));
        CHECK(dr.atom(i)(0, 0) == doctest::Approx(expect).epsilon(1e-10));
    }

    const DiscreteMeasure zipped = pf_zip(
        mu, mu, [](const HpdMatrix& a, const HpdMatrix& b) {
            return HpdMatrix(Eigen::MatrixXd(a.mat() + b.mat()));
        });
    CHECK((zipped.atom(0).mat() - 2.0 * mu.atom(0).mat()).cwiseAbs().maxCoeff() <= 1e-14);
    const DiscreteMeasure other({scalar(1.0)}, {Rational(1)});
    CHECK_THROWS_AS(pf_zip(mu, other,
                           [](const HpdMatrix& a, const HpdMatrix&) { return a; }),
                    LengthMismatch);
}

TEST_CASE("norm pushforward collapses atoms to positive scalars") {
    const DiscreteMeasure mu({diag2(1, 4), diag2(2, 3)}, {Rational(1, 2), Rational(1, 2)});
    const DiscreteMeasure nm = pf_norm(mu, [](const HpdMatrix& a) { return a.lambda_max(); });
    CHECK(nm.dim() == 1);
    CHECK(nm.atom(0)(0, 0) == doctest::Approx(4.0));
    CHECK(nm.atom(1)(0, 0) == doctest::Approx(3.0));
    // Atoms are lazy: a norm that goes negative surfaces as a positivity
    // error the first time the pushed-forward atom's spectrum is demanded.
    const DiscreteMeasure bad = pf_norm(mu, [](const HpdMatrix&) { return -1.0; });
    CHECK_THROWS_AS(bad.atom(0).lambda_min(), NotPositiveDefinite);
}

TEST_CASE("direct sum forms block diagonals over all atom pairs with product weights") {
    const DiscreteMeasure mu({scalar(1.0), scalar(2.0)}, {Rational(1, 3), Rational(2, 3)});
    const DiscreteMeasure nu({scalar(5.0)}, {Rational(1)});
    const DiscreteMeasure ds = direct_sum(mu, nu);
    CHECK(ds.dim() == 2);
    CHECK(ds.size() == 2);
    CHECK(ds.weight(0) == Rational(1, 3));
    CHECK(ds.weight(1) == Rational(2, 3));
    CHECK(ds.atom(0)(0, 0) == doctest::Approx(1.0));
    CHECK(ds.atom(0)(1, 1) == doctest::Approx(5.0));
    CHECK(ds.atom(0)(0, 1) == doctest::Approx(0.0));

    // Product weights must be exact rationals.
    const DiscreteMeasure nu2({scalar(5.0), scalar(7.0)}, {Rational(1, 7), Rational(6, 7)});
    const DiscreteMeasure ds2 = direct_sum(mu, nu2);
    CHECK(ds2.size() == 4);
    Rational total;
    for (std::size_t i = 0; i < ds2.size(); ++i) total += ds2.weight(i);
    CHECK(total == Rational(1));
    CHECK(ds2.weight(0) == Rational(1, 21));
}

TEST_CASE("mixture concatenates supports with exact mixed weights") {
    const DiscreteMeasure mu({scalar(1.0)}, {Rational(1)});
    const DiscreteMeasure nu({scalar(2.0), scalar(3.0)}, {Rational(1, 2), Rational(1, 2)});
    const DiscreteMeasure mix = mixture(mu, nu, Rational(1, 3));
    CHECK(mix.size() == 3);
    CHECK(mix.weight(0) == Rational(1, 3));
    CHECK(mix.weight(1) == Rational(1, 3));
    CHECK(mix.weight(2) == Rational(1, 3));
    CHECK_THROWS_AS(mixture(mu, nu, Rational(0)), ParamOutOfRange);
    CHECK_THROWS_AS(mixture(mu, nu, Rational(1)), ParamOutOfRange);
}

TEST_CASE("integration is the weighted sum of the integrand") {
    const DiscreteMeasure mu({diag2(1, 2), diag2(3, 6)}, {Rational(1, 4), Rational(3, 4)});
    const Eigen::MatrixXd m =
        integrate_sym(mu, [](const HpdMatrix& a) { return a.mat(); });
    CHECK(m(0, 0) == doctest::Approx(0.25 * 1 + 0.75 * 3).epsilon(1e-14));
    CHECK(m(1, 1) == doctest::Approx(0.25 * 2 + 0.75 * 6).epsilon(1e-14));
    const double tr = integrate(mu, [](const HpdMatrix& a) { return a.trace(); });
    CHECK(tr == doctest::Approx(0.25 * 3 + 0.75 * 9).epsilon(1e-14));
}

TEST_CASE("support band of a measure spans all atoms") {
    const DiscreteMeasure mu({diag2(0.5, 2), diag2(0.25, 1)}, {Rational(1, 2), Rational(1, 2)});
    CHECK(sigma_epsilon_of(mu).epsilon == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("sigma-left pushforward moves every atom toward the base point") {
    std::mt19937_64 rng(9);
    const DiscreteMeasure mu = random_measure(2, 3, 0.2, rng);
    const HpdMatrix x = random_hpd(2, 0.2, rng);
    const RepresentingMean sigma = RepresentingMean::geometric(0.5);
    const DiscreteMeasure moved = pf_sigma_left(mu, x, sigma);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const HpdMatrix expect = sigma.apply(x, mu.atom(i));
        CHECK(thompson_distance(moved.atom(i), expect) <= 1e-11);
        // Geometric interpolation halves the Thompson distance to x.
        CHECK(thompson_distance(moved.atom(i), x) <=
              0.5 * thompson_distance(mu.atom(i), x) + 1e-9);
    }
}
