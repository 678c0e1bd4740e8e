// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include "opmeans/recipe.hpp"
#include "opmeans/stochastic_order.hpp"

namespace opmeans {

/// p-Wasserstein distance under the Thompson ground metric:
///   d_p^W(mu, nu) = [ min over couplings of integral d_T(A, B)^p ]^{1/p}.
/// Solved exactly on the bipartite transport polytope by the
/// transportation simplex with rational flows; costs are floats, so the
/// optimal value inherits only the float error of d_T (about 1e-9 * scale).
double wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Bottleneck (infinity-)Wasserstein distance: the smallest pairwise
/// Thompson distance threshold at which a feasible transport exists. The
/// infimum is attained at one of the pairwise distances, which is what the
/// search returns — no continuous tolerance involved.
double wasserstein_inf(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// The optimal coupling behind wasserstein_p (exposed for tests).
Coupling wasserstein_p_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Contraction chain for a mean recipe M:
///   d_T(M(mu), M(nu)) <= delta_T(mu, nu) <= d_inf^W(mu, nu).
struct ContractionReport {
    double dT;
    double deltaT;
    double dWinf;
    bool pass;
};

/// Evaluates both inequalities with slack 1e-7 plus the solver and search
/// tolerances in play.
ContractionReport contraction_check(const MeanRecipe& m, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu, const SolverConfig& cfg = {});

} // namespace opmeans
