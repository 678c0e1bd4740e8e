// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "opmeans/random_instances.hpp"
#include "opmeans/stochastic_order.hpp"

using namespace opmeans;

namespace {

HpdMatrix scalar(double v) { return HpdMatrix(Eigen::MatrixXd::Constant(1, 1, v)); }

HpdMatrix scaled_identity(Eigen::Index n, double v) {
    return HpdMatrix(Eigen::MatrixXd(v * Eigen::MatrixXd::Identity(n, n)));
}

// Independent oracle for dimension one, where the stochastic order is
// classical first-order dominance: for every threshold t, the mass mu puts
// on (t, infinity) must not exceed the mass nu puts there. Checked with
// exact rational partial sums at the atom thresholds.
bool dominance_oracle_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    std::vector<double> thresholds;
    for (std::size_t i = 0; i < mu.size(); ++i) thresholds.push_back(mu.atom(i)(0, 0));
    for (std::size_t j = 0; j < nu.size(); ++j) thresholds.push_back(nu.atom(j)(0, 0));
    for (double t : thresholds) {
        Rational mu_above, nu_above;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            if (mu.atom(i)(0, 0) > t) mu_above += mu.weight(i);
        }
        for (std::size_t j = 0; j < nu.size(); ++j) {
            if (nu.atom(j)(0, 0) > t) nu_above += nu.weight(j);
        }
        if (nu_above < mu_above) return false;
    }
    return true;
}

// Random exact rational weights over a given support.
DiscreteMeasure with_random_weights(std::vector<HpdMatrix> atoms, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int64_t> small(1, 5);
    std::vector<std::int64_t> parts(atoms.size());
    std::int64_t total = 0;
    for (auto& p : parts) {
        p = small(rng);
        total += p;
    }
    std::vector<Rational> w;
    w.reserve(parts.size());
    for (std::int64_t p : parts) w.emplace_back(p, total);
    return DiscreteMeasure(std::move(atoms), std::move(w));
}

// Coupling sanity: marginals reproduce the weights exactly, and every cell
// carrying mass pairs atoms in Loewner order.
void check_coupling(const Coupling& c, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    double slack) {
    REQUIRE(c.pi.size() == mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        REQUIRE(c.pi[i].size() == nu.size());
        Rational row;
        for (const Rational& cell : c.pi[i]) row += cell;
        CHECK(row == mu.weight(i));
    }
    for (std::size_t j = 0; j < nu.size(); ++j) {
        Rational col;
        for (std::size_t i = 0; i < mu.size(); ++i) col += c.pi[i][j];
        CHECK(col == nu.weight(j));
    }
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = 0; j < nu.size(); ++j) {
            if (c.pi[i][j].is_zero()) continue;
            CHECK(loewner_leq(mu.atom(i), nu.atom(j), slack));
        }
    }
}

} // namespace

TEST_CASE("classic incomparable pair is refused in both directions with a cut") {
    // mu = 1/3 delta_I + 2/3 delta_{3I}, nu = 2/3 delta_{2I} + 1/3 delta_{4I}.
    // mu's heavy atom 3I only fits under 4I, which carries mass 1/3 < 2/3,
    // so no coupling exists; symmetrically nu's 2I-atom only fits under 3I.
    const DiscreteMeasure mu({scaled_identity(2, 1.0), scaled_identity(2, 3.0)},
                             {Rational(1, 3), Rational(2, 3)});
    const DiscreteMeasure nu({scaled_identity(2, 2.0), scaled_identity(2, 4.0)},
                             {Rational(2, 3), Rational(1, 3)});

    const OrderVerdict fwd = stochastic_leq(mu, nu);
    CHECK_FALSE(fwd.leq);
    CHECK_FALSE(fwd.coupling.has_value());
    REQUIRE(fwd.certificate.has_value());
    const CutCertificate& cert = *fwd.certificate;
    CHECK(cert.nu_mass < cert.mu_mass);
    // The blocking set is the 3I atom: its mass 2/3 exceeds the 1/3 above it.
    REQUIRE(cert.mu_side.size() == 1);
    CHECK(cert.mu_side[0] == 1);
    CHECK(cert.mu_mass == Rational(2, 3));
    CHECK(cert.nu_mass == Rational(1, 3));
    for (std::size_t i : cert.mu_side) {
        for (std::size_t j = 0; j < nu.size(); ++j) {
            const bool reachable = std::find(cert.nu_reachable.begin(), cert.nu_reachable.end(),
                                             j) != cert.nu_reachable.end();
            if (!reachable) {
                CHECK_FALSE(loewner_leq(mu.atom(i), nu.atom(j), default_order_slack(mu, nu)));
            }
        }
    }

    const OrderVerdict bwd = stochastic_leq(nu, mu);
    CHECK_FALSE(bwd.leq);
    REQUIRE(bwd.certificate.has_value());
    CHECK(bwd.certificate->nu_mass < bwd.certificate->mu_mass);
}

TEST_CASE("feasible order produces an exact coupling that a falsifier cannot refute") {
    // Push every atom up by a PSD bump: order holds atomwise under the
    // identity coupling, but the solver is free to return any coupling.
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 6; ++rep) {
        const auto [mu, nu] = random_ordered_pair(3, 3, 0.1, rng);
        const double slack = default_order_slack(mu, nu);
        const OrderVerdict v = stochastic_leq(mu, nu);
        REQUIRE(v.leq);
        REQUIRE(v.coupling.has_value());
        check_coupling(*v.coupling, mu, nu, slack);
        CHECK_FALSE(monotone_function_falsifier(mu, nu, 40, 17).has_value());
    }
}

TEST_CASE("cross-weight coupling is found when only a non-identity matching works") {
    // mu puts 1/2 on each of {1, 2}; nu puts 1/4 on 2 and 3/4 on 5.
    // The atom 2 of mu cannot all go to nu's atom 2 (mass 1/4), so the
    // coupling must split: exactness of the rational flow matters.
    const DiscreteMeasure mu({scalar(1.0), scalar(2.0)}, {Rational(1, 2), Rational(1, 2)});
    const DiscreteMeasure nu({scalar(2.0), scalar(5.0)}, {Rational(1, 4), Rational(3, 4)});
    const OrderVerdict v = stochastic_leq(mu, nu);
    REQUIRE(v.leq);
    check_coupling(*v.coupling, mu, nu, default_order_slack(mu, nu));
    CHECK(dominance_oracle_1d(mu, nu));
}

TEST_CASE("dimension-one verdicts agree with the first-order dominance oracle") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> val(1, 6);
    for (int rep = 0; rep < 60; ++rep) {
        std::vector<HpdMatrix> a, b;
        const int na = 2 + rep % 3, nb = 2 + (rep / 3) % 3;
        for (int i = 0; i < na; ++i) a.push_back(scalar(static_cast<double>(val(rng))));
        for (int j = 0; j < nb; ++j) b.push_back(scalar(static_cast<double>(val(rng))));
        const DiscreteMeasure mu = with_random_weights(std::move(a), rng);
        const DiscreteMeasure nu = with_random_weights(std::move(b), rng);
        // Atoms are integers >= 1 apart, so the default slack cannot blur
        // the strict comparisons the oracle makes.
        const OrderVerdict v = stochastic_leq(mu, nu);
        CHECK(v.leq == dominance_oracle_1d(mu, nu));
        if (v.leq) {
            check_coupling(*v.coupling, mu, nu, default_order_slack(mu, nu));
        } else {
            REQUIRE(v.certificate.has_value());
            CHECK(v.certificate->nu_mass < v.certificate->mu_mass);
        }
    }
}

TEST_CASE("order distance between measures matches hand values") {
    const DiscreteMeasure one = DiscreteMeasure::dirac(scalar(1.0));
    const DiscreteMeasure four = DiscreteMeasure::dirac(scalar(4.0));
    CHECK(delta_T(one, four) == doctest::Approx(std::log(4.0)).epsilon(1e-6));
    CHECK(delta_T(four, one) == doctest::Approx(std::log(4.0)).epsilon(1e-6));
    CHECK(delta_T(one, one) <= 1e-7);

    std::mt19937_64 rng(17);
    const DiscreteMeasure mu = random_measure(2, 3, 0.2, rng);
    CHECK(delta_T(mu, mu) <= 1e-7);
    // Scaling by c shifts every atom by log c in the Thompson metric, and
    // the scaled copy brackets the original exactly at r = log c.
    const double c = 3.0;
    CHECK(delta_T(mu, pf_scale(mu, c)) == doctest::Approx(std::log(c)).epsilon(1e-5));
    // Symmetry and the triangle inequality on a random triple.
    const DiscreteMeasure nu = random_measure(2, 3, 0.2, rng);
    const DiscreteMeasure rho = random_measure(2, 3, 0.2, rng);
    const double ab = delta_T(mu, nu), ba = delta_T(nu, mu);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-6));
    CHECK(delta_T(mu, rho) <= ab + delta_T(nu, rho) + 1e-6);
}

TEST_CASE("order axioms hold on random instances") {
    std::mt19937_64 rng(19);
    const DiscreteMeasure mu = random_measure(2, 2, 0.1, rng);
    const DiscreteMeasure nu = random_measure(2, 3, 0.1, rng);
    const OrderAxiomsReport rep = measure_order_axioms(mu, nu, 0.5);
    CHECK(rep.reflexive);
    CHECK(rep.transitive);
    CHECK(rep.violations.empty());
}
