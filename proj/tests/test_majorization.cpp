// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "opmeans/majorization.hpp"
#include "opmeans/random_instances.hpp"

using namespace opmeans;

TEST_CASE("majorization verdicts on hand-picked vectors") {
    // (3, 1) strongly majorizes (2, 2): partial sums 3 >= 2, totals equal.
    CHECK(majorize({2, 2}, {3, 1}, MajorizationKind::Strong).pass);
    CHECK_FALSE(majorize({3, 1}, {2, 2}, MajorizationKind::Strong).pass);
    // Weak drops the total-sum equality.
    CHECK(majorize({2, 1}, {3, 1}, MajorizationKind::Weak).pass);
    CHECK_FALSE(majorize({2, 2}, {3, 0.5}, MajorizationKind::Strong).pass);
    // Order of listing must not matter (rearrangement is part of the order).
    CHECK(majorize({2, 2}, {1, 3}, MajorizationKind::Strong).pass);
    CHECK(majorize({1, 2, 3}, {3, 2, 1}, MajorizationKind::Strong).pass);
    // Log: products of prefixes dominate, total products equal.
    CHECK(majorize({2, 2}, {4, 1}, MajorizationKind::Log).pass);
    CHECK_FALSE(majorize({4, 1}, {2, 2}, MajorizationKind::Log).pass);
    CHECK_FALSE(majorize({2, 2}, {4, 2}, MajorizationKind::Log).pass);
    // Super: sums of the k smallest of the left dominate the right's.
    CHECK(majorize({2, 2}, {1, 3}, MajorizationKind::Super).pass);
    CHECK_FALSE(majorize({1, 3}, {2, 2}, MajorizationKind::Super).pass);

    const MajorizationVerdict v = majorize({2, 2}, {3, 1}, MajorizationKind::Strong);
    REQUIRE(v.lhs_partial.size() == 2);
    CHECK(v.lhs_partial[0] == doctest::Approx(2.0));
    CHECK(v.lhs_partial[1] == doctest::Approx(4.0));
    CHECK(v.rhs_partial[0] == doctest::Approx(3.0));
    CHECK(v.worst_margin >= 0.0);

    const MajorizationVerdict bad = majorize({3, 1}, {2, 2}, MajorizationKind::Strong);
    CHECK(bad.worst_margin == doctest::Approx(-1.0).epsilon(1e-12));

    CHECK_THROWS_AS(majorize({1, 2}, {1, 2, 3}, MajorizationKind::Weak), LengthMismatch);
    CHECK_THROWS_AS(majorize({-1, 2}, {0, 1}, MajorizationKind::Log), DomainError);
}

TEST_CASE("diagonal of a rotated diagonal matrix is majorized by the eigenvalues") {
    // Schur-Horn: diag(U D U^T) prec eig(D); independent of library
    // eigensolvers because the eigenvalues are planted.
    std::mt19937_64 rng(149);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::MatrixXd u = random_orthogonal(4, rng);
        Eigen::VectorXd lam(4);
        std::uniform_real_distribution<double> val(0.1, 5.0);
        for (int i = 0; i < 4; ++i) lam(i) = val(rng);
        const Eigen::MatrixXd a = u * lam.asDiagonal() * u.transpose();
        std::vector<double> diag(4), eig(4);
        for (int i = 0; i < 4; ++i) {
            diag[i] = a(i, i);
            eig[i] = lam(i);
        }
        CHECK(majorize(diag, eig, MajorizationKind::Strong).pass);
    }
}

TEST_CASE("eigenvalue vectors come out descending") {
    std::mt19937_64 rng(151);
    const HpdMatrix a = random_hpd(4, 0.05, rng);
    const std::vector<double> v = eigenvalue_vector(a);
    REQUIRE(v.size() == 4);
    CHECK(std::is_sorted(v.rbegin(), v.rend()));
    CHECK(v.front() == doctest::Approx(a.lambda_max()).epsilon(1e-13));
    CHECK(v.back() == doctest::Approx(a.lambda_min()).epsilon(1e-13));
}

TEST_CASE("parallel sum matches hand values and the commuting reduction") {
    const HpdMatrix one = HpdMatrix::identity(1);
    CHECK(parallel_sum(one, one)(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

    // Commuting pair: entrywise a b / (a + b) in the common eigenbasis.
    std::mt19937_64 rng(157);
    const Eigen::MatrixXd q = random_orthogonal(3, rng);
    Eigen::VectorXd la(3), lb(3);
    la << 1, 2, 3;
    lb << 2, 3, 6;
    const HpdMatrix a(Eigen::MatrixXd(q * la.asDiagonal() * q.transpose()));
    const HpdMatrix b(Eigen::MatrixXd(q * lb.asDiagonal() * q.transpose()));
    Eigen::VectorXd expect(3);
    for (int i = 0; i < 3; ++i) expect(i) = la(i) * lb(i) / (la(i) + lb(i));
    const HpdMatrix expected(Eigen::MatrixXd(q * expect.asDiagonal() * q.transpose()));
    CHECK(thompson_distance(parallel_sum(a, b), expected) <= 1e-12);

    const std::vector<double> vec = parallel_sum(std::vector<double>{1.0, 2.0},
                                                 std::vector<double>{1.0, 6.0});
    CHECK(vec[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(vec[1] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("builtin norms take their textbook values on diag(3, 2, 1)") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d.diagonal() << 3, 2, 1;
    const HpdMatrix a(d);
    CHECK(operator_norm().fn(a) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(trace_norm().fn(a) == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(ky_fan_norm(1).fn(a) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(ky_fan_norm(2).fn(a) == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(ky_fan_norm(3).fn(a) == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(numerical_radius().fn(a) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(operator_plus_trace_norm().fn(a) == doctest::Approx(9.0).epsilon(1e-13));
    CHECK_THROWS_AS(ky_fan_norm(0), ParamOutOfRange);

    const auto battery = builtin_monotone_norms(3);
    CHECK(battery.size() >= 5);
    for (const MonotoneNorm& norm : battery) {
        CHECK(!norm.name.empty());
        CHECK(norm.fn(a) > 0.0);
    }
}

TEST_CASE("builtin norms are monotone on Loewner-ordered pairs") {
    std::mt19937_64 rng(163);
    for (int rep = 0; rep < 10; ++rep) {
        const auto [mu, nu] = random_ordered_pair(3, 1, 0.1, rng);
        const HpdMatrix& small = mu.atom(0);
        const HpdMatrix& large = nu.atom(0);
        for (const MonotoneNorm& norm : builtin_monotone_norms(3)) {
            CHECK(norm.fn(small) <= norm.fn(large) + 1e-10);
        }
    }
}

TEST_CASE("positive maps have the advertised structure") {
    std::mt19937_64 rng(167);
    const HpdMatrix a = random_hpd(4, 0.1, rng);

    const PositiveMap comp = compression_map({0, 2}, 4);
    CHECK(comp.out_dim == 2);
    const HpdMatrix ca = comp.fn(a);
    CHECK(ca.dim() == 2);
    CHECK(ca(0, 0) == doctest::Approx(a(0, 0)).epsilon(1e-14));
    CHECK(ca(0, 1) == doctest::Approx(a(0, 2)).epsilon(1e-14));
    CHECK(ca(1, 1) == doctest::Approx(a(2, 2)).epsilon(1e-14));

    const PositiveMap pinch = pinching_map({{0, 1}, {2, 3}}, 4);
    CHECK(pinch.out_dim == 4);
    const HpdMatrix pa = pinch.fn(a);
    CHECK(pa.trace() == doctest::Approx(a.trace()).epsilon(1e-13));
    CHECK(pa(0, 2) == doctest::Approx(0.0));
    CHECK(pa(1, 3) == doctest::Approx(0.0));
    CHECK(pa(0, 1) == doctest::Approx(a(0, 1)).epsilon(1e-14));

    const Eigen::MatrixXd s = random_invertible(4, rng);
    const PositiveMap unital = normalized_congruence_map(s);
    const HpdMatrix image_of_identity = unital.fn(HpdMatrix::identity(4));
    CHECK(thompson_distance(image_of_identity, HpdMatrix::identity(4)) <= 1e-10);

    const PositiveMap conv =
        convex_conjugation_map({0.5, 2.0}, {Eigen::MatrixXd::Identity(4, 4), s});
    const HpdMatrix va = conv.fn(a);
    const Eigen::MatrixXd expect = 0.5 * a.mat() + 2.0 * s * a.mat() * s.transpose();
    CHECK((va.mat() - expect).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(convex_conjugation_map({-1.0}, {s}), ParamOutOfRange);
    CHECK_THROWS_AS(convex_conjugation_map({1.0, 1.0}, {s}), LengthMismatch);
}

TEST_CASE("positive maps preserve the Loewner order") {
    std::mt19937_64 rng(173);
    const Eigen::MatrixXd s = random_invertible(4, rng);
    const std::vector<PositiveMap> maps = {
        compression_map({1, 3}, 4),
        pinching_map({{0}, {1, 2, 3}}, 4),
        normalized_congruence_map(s),
    };
    for (int rep = 0; rep < 8; ++rep) {
        const auto [mu, nu] = random_ordered_pair(4, 1, 0.1, rng);
        for (const PositiveMap& map : maps) {
            CHECK(loewner_leq(map.fn(mu.atom(0)), map.fn(nu.atom(0)), 1e-10));
        }
    }
}
