// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opmeans/measure.hpp"

namespace opmeans {

/// A coupling between two measures: pi(i, j) is the mass moved from atom i
/// of the row measure to atom j of the column measure. Row and column sums
/// reproduce the weight vectors exactly.
struct Coupling {
    std::vector<std::vector<Rational>> pi;
};

/// Dual certificate that no order-compatible coupling exists: a set S of
/// row atoms whose only admissible partners N(S) carry strictly less mass.
struct CutCertificate {
    std::vector<std::size_t> mu_side;    // S
    std::vector<std::size_t> nu_reachable; // N(S)
    Rational mu_mass;
    Rational nu_mass; // nu_mass < mu_mass proves infeasibility
};

/// Outcome of a stochastic-order query.
struct OrderVerdict {
    bool leq = false;
    std::optional<Coupling> coupling;       // present when leq
    std::optional<CutCertificate> certificate; // present when !leq
};

/// Decides mu <= nu in the stochastic order induced by the Loewner order:
/// true iff some coupling is supported on pairs with A_i <= B_j (up to
/// slack). Decided by exact max-flow over rational weights.
OrderVerdict stochastic_leq(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double slack);

/// Default Loewner slack for order queries: 1e-9 * (1 + largest eigenvalue
/// across both supports).
double default_order_slack(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// stochastic_leq with the default slack.
OrderVerdict stochastic_leq(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// A monotone test function that separates the two measures, if one was
/// found: f(A) = tr g(K^{1/2} A K^{1/2}) with g nondecreasing.
struct FalsifierViolation {
    std::string description;
    double integral_mu;
    double integral_nu;
};

/// Samples monotone test functions and reports the first one with
/// integral over mu exceeding the integral over nu by more than 1e-9.
/// Independent refuter for positive stochastic_leq verdicts.
std::optional<FalsifierViolation> monotone_function_falsifier(const DiscreteMeasure& mu,
                                                              const DiscreteMeasure& nu,
                                                              int trials, std::uint64_t seed);

/// Thompson-type order distance between measures:
///   delta_T(mu, nu) = inf { r >= 0 : e^{-r}.nu <= mu <= e^{r}.nu }.
/// Binary search; the result is within tol of the infimum.
double delta_T(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double tol = 1e-8);

/// Partial-order sanity report on a sampled instance family.
struct OrderAxiomsReport {
    bool reflexive = false;      // mu <= mu and nu <= nu
    bool transitive = false;     // mu <= scaled <= scaled^2 chain implies ends
    bool antisymmetric = false;  // mutual order implies equal weighted supports
    bool antisymmetry_applicable = false;
    std::vector<std::string> violations;
};

/// Checks reflexivity, a scaled transitivity chain (factor 1 + lam), and
/// antisymmetry (when mu and nu dominate each other, their supports must
/// agree as weighted sets within tolerance).
OrderAxiomsReport measure_order_axioms(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       double lam);

} // namespace opmeans
