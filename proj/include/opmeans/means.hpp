// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

#include "opmeans/solver.hpp"

namespace opmeans {

/// Integral of the identity map: sum of w_i A_i.
HpdMatrix arithmetic_mean(const DiscreteMeasure& mu);
/// Inverse of the arithmetic mean of the inverses.
HpdMatrix harmonic_mean(const DiscreteMeasure& mu);
/// exp of the integral of log: exp(sum of w_i log A_i).
HpdMatrix log_euclidean_mean(const DiscreteMeasure& mu);

/// Power mean P_r for r in [-1, 1] \ {0}: the unique solution of
///   X = A(X #_r mu)        (r > 0)
///   X = H(X #_{-r} mu)     (r < 0),
/// equivalently of the residual equation
///   integral (X^{-1/2} A X^{-1/2})^r dmu(A) = I.
/// Moderate exponents (|r| >= 1/8) run the monotone deformation iteration;
/// small exponents switch to an equivalent scaled iteration on the residual
/// equation, since the plain iteration contracts like 1 - |r| (see the
/// note in the implementation).
SolveResult power_mean(double r, const DiscreteMeasure& mu, const SolverConfig& cfg = {});

/// Karcher (Cartan barycenter) mean: the solution of
///   integral log(X^{-1/2} A X^{-1/2}) dmu(A) = 0,
/// by the damped exponential fixed point X <- X^{1/2} exp(theta S) X^{1/2}
/// with S the residual integral, initialized at the log-Euclidean mean.
/// The trace residual column is the operator norm of S.
SolveResult karcher_mean(const DiscreteMeasure& mu, const SolverConfig& cfg = {});

/// Bracket report for the power-mean limit: P_{-r} <= G <= P_r with widths
/// shrinking as r decreases.
struct PowerLimitReport {
    struct Row {
        double r;
        double width; // d_T(P_{-r}, P_r)
    };
    HpdMatrix value; // geometric midpoint of the final bracket
    std::vector<Row> rows;
    bool monotone_ok = false; // widths non-increasing within 1e-9
};

/// Default exponent sequence 2^{-1}, ..., 2^{-20}.
std::vector<double> default_power_limit_sequence();

/// Approximates the Karcher mean as the limit of power means along a
/// decreasing exponent sequence, warm-starting each solve from the last;
/// returns the midpoint of the final bracket plus the width report.
PowerLimitReport karcher_via_power_limit(
    const DiscreteMeasure& mu,
    const std::vector<double>& r_sequence = default_power_limit_sequence(),
    const SolverConfig& cfg = {});

/// Report for the harmonic-mean limit of deformed arithmetic means
/// A_{!_s}(mu) as s decreases to 0: the values decrease in the Loewner
/// order and converge to H(mu). The terminal tolerance is extrapolated
/// from the observed gaps (gap ~ C * s).
struct HarmonicLimitReport {
    struct Row {
        double s;
        double gap; // d_T(A_{!_s}(mu), H(mu))
    };
    std::vector<Row> rows;
    bool monotone_ok = false;  // Loewner decrease within 1e-8 * scale
    bool terminal_ok = false;  // final gap <= 2 * C_hat * s_final
    double c_hat = 0.0;        // fitted slope of gap vs s
};

/// Default shrink sequence 2^{-1}, ..., 2^{-8}.
std::vector<double> default_harmonic_limit_sequence();

HarmonicLimitReport harmonic_limit_check(
    const DiscreteMeasure& mu,
    const std::vector<double>& s_sequence = default_harmonic_limit_sequence(),
    const SolverConfig& cfg = {});

} // namespace opmeans
