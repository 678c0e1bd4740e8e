// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "opmeans/errors.hpp"
#include "opmeans/measure.hpp"

namespace opmeans {

/// An operator mean of measures, abstracted as an evaluator.
using MeasureMean = std::function<HpdMatrix(const DiscreteMeasure&)>;

/// Fixed-point solver configuration. Acceptance is equation-anchored: the
/// Thompson step between successive iterates must fall below iter_tol, the
/// remaining distance projected from the observed contraction rate must fit
/// inside it as well, and the equation residual of the returned iterate
/// must pass residual_tol. iter_tol therefore bounds the distance from the
/// returned value to the true fixed point, not merely the last step.
struct SolverConfig {
    enum class Start { Upper, Lower, Given };

    double iter_tol = 1e-11;
    double residual_tol = 1e-9;
    int max_iter = 10000;
    Start start = Start::Upper;
    std::optional<HpdMatrix> start_value;

    /// Budget for solves nested inside another solve: one decade tighter,
    /// so tolerances do not stack across recipe depth, floored near the
    /// rounding floor of double-precision spectral arithmetic (demands
    /// below it would stagnate rather than converge).
    [[nodiscard]] SolverConfig inner() const {
        SolverConfig c = *this;
        c.iter_tol = std::max(iter_tol / 10.0, 2e-13);
        c.residual_tol = std::max(residual_tol / 10.0, 2e-12);
        c.start = Start::Upper;
        c.start_value.reset();
        return c;
    }

    void validate() const;
};

/// One recorded iteration: step = Thompson distance between successive
/// iterates; residual = equation residual of the accepted iterate (for the
/// deformation iteration this coincides with the next step).
struct TraceStep {
    int k;
    double step;
    double residual;
};

enum class SolveStatus { Converged, MaxIter, MonotoneViolation };

struct ConvergenceTrace {
    std::vector<TraceStep> steps;
    SolveStatus status = SolveStatus::Converged;
};

/// Terminal failure of an iterative solve; carries the trace.
class MaxIterExceeded : public ConvergenceError {
  public:
    MaxIterExceeded(const std::string& what, ConvergenceTrace trace)
        : ConvergenceError(what), trace(std::move(trace)) {}
    ConvergenceTrace trace;
};

/// The monotone iterate sequence broke the Loewner order beyond slack.
/// Monotonicity is the backbone of the convergence argument, so this is
/// surfaced rather than clipped.
class MonotoneViolationError : public ConvergenceError {
  public:
    MonotoneViolationError(const std::string& what, ConvergenceTrace trace)
        : ConvergenceError(what), trace(std::move(trace)) {}
    ConvergenceTrace trace;
};

struct SolveResult {
    HpdMatrix value;
    ConvergenceTrace trace;
};

/// Solves the deformed-mean equation X = M(X sigma mu) by the monotone
/// fixed-point iteration X_{k+1} = M(X_k sigma mu), started from
/// (1/eps) I (Upper), eps I (Lower) or a given point, with eps certifying
/// the support bound of mu. From the Upper start the iterates decrease
/// monotonely to the unique solution (dually for Lower); violations beyond
/// 1e-9 * scale abort.
SolveResult deform_solve(const MeasureMean& m, const RepresentingMean& sigma,
                         const DiscreteMeasure& mu, const SolverConfig& cfg = {});

} // namespace opmeans
