// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/solver.hpp"

#include <cmath>
#include <limits>

namespace opmeans {

void SolverConfig::validate() const {
    if (!(iter_tol > 0.0) || !(residual_tol > 0.0)) {
        throw ParamOutOfRange("SolverConfig: tolerances must be positive");
    }
    if (max_iter < 1) throw ParamOutOfRange("SolverConfig: max_iter must be at least 1");
    if (start == Start::Given && !start_value) {
        throw ParamOutOfRange("SolverConfig: start = Given requires a start value");
    }
}

SolveResult deform_solve(const MeasureMean& m, const RepresentingMean& sigma,
                         const DiscreteMeasure& mu, const SolverConfig& cfg) {
    cfg.validate();
    if (sigma.is_left_trivial()) {
        throw RecipeInvalid("deform_solve: deformation by the left-trivial mean is degenerate "
                            "(every X solves X = M(X sigma mu))");
    }

    const Eigen::Index n = mu.dim();
    // The monotone starts are the tightest multiples of the identity
    // enclosing the support: the map sends any upper bound of the support
    // at or below itself (and dually for lower bounds), and these scale
    // with the measure instead of collapsing for rescaled supports the
    // way the absolute support-band bound would.
    HpdMatrix x = [&] {
        switch (cfg.start) {
            case SolverConfig::Start::Given:
                return *cfg.start_value;
            case SolverConfig::Start::Lower: {
                double lo = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < mu.size(); ++i)
                    lo = std::min(lo, mu.atom(i).lambda_min());
                return HpdMatrix(Eigen::MatrixXd(lo * Eigen::MatrixXd::Identity(n, n)));
            }
            case SolverConfig::Start::Upper:
            default: {
                double hi = 0.0;
                for (std::size_t i = 0; i < mu.size(); ++i)
                    hi = std::max(hi, mu.atom(i).lambda_max());
                return HpdMatrix(Eigen::MatrixXd(hi * Eigen::MatrixXd::Identity(n, n)));
            }
        }
    }();
    if (x.dim() != n) {
        throw DimensionMismatch("deform_solve: start value has dimension " +
                                std::to_string(x.dim()) + ", measure has " + std::to_string(n));
    }

    auto f = [&](const HpdMatrix& point) { return m(pf_sigma_left(mu, point, sigma)); };

    ConvergenceTrace trace;
    double prev_step = -1.0;
    double prev_ratio = -1.0;
    double best_step = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        HpdMatrix next = f(x);
        const double step = thompson_distance(x, next);
        trace.steps.push_back({k, step, step});
        if (step < best_step) {
            best_step = step;
            best_k = k;
        }
        // Iterations since the step size last improved. A contracting
        // iteration sets a new record almost every step; a long gap means
        // the steps are bouncing around the rounding floor of the map
        // evaluation, where the ratios are pure noise.
        const int stalled_for = k - best_k;

        if (cfg.start != SolverConfig::Start::Given) {
            const double slack = 1e-9 * std::max(1.0, x.lambda_max());
            const bool ordered = cfg.start == SolverConfig::Start::Upper
                                     ? loewner_leq(next, x, slack)
                                     : loewner_leq(x, next, slack);
            if (!ordered) {
                trace.status = SolveStatus::MonotoneViolation;
                throw MonotoneViolationError(
                    "deform_solve: iterate order violated at step " + std::to_string(k) +
                        " beyond slack " + format_double(slack),
                    trace);
            }
        }

        // A small step alone leaves a position error of roughly
        // step * q / (1 - q) for contraction rate q, which can exceed the
        // step tolerance by orders of magnitude when q is close to 1. The
        // remaining distance is therefore projected from the observed step
        // ratios (the worse of the last two, capped below 1) and must fit
        // inside half the step tolerance before the candidate is accepted.
        const double ratio = prev_step > 0.0 ? step / prev_step : -1.0;
        const double rate_est =
            ratio >= 0.0 ? std::max(ratio, prev_ratio >= 0.0 ? prev_ratio : ratio) : -1.0;
        const double q = rate_est >= 0.0 ? std::min(rate_est, 0.995) : 0.995;
        const double projected = step * q / (1.0 - q);

        bool try_accept = false;
        bool at_floor = false;
        if (step < cfg.iter_tol) {
            // The projection can never clear at the floor, so acceptance
            // falls back there to the equation anchor alone.
            try_accept = projected <= 0.5 * cfg.iter_tol || stalled_for >= 3;
        }
        if (!try_accept && stalled_for >= 100) {
            // Stagnated without ever reaching the step tolerance: the
            // demanded accuracy is not attainable for this instance. One
            // residual check decides between accepting on the equation
            // anchor and failing fast instead of burning the budget.
            try_accept = true;
            at_floor = true;
        }

        if (try_accept) {
            // Equation-anchored acceptance: confirm the candidate's own
            // residual with one extra evaluation.
            HpdMatrix check = f(next);
            const double residual = thompson_distance(next, check);
            trace.steps.back().residual = residual;
            if (residual <= cfg.residual_tol) {
                trace.status = SolveStatus::Converged;
                return {next, std::move(trace)};
            }
            if (at_floor) {
                trace.status = SolveStatus::MaxIter;
                throw MaxIterExceeded(
                    "deform_solve: iteration stagnated at step " + format_double(step) +
                        " with residual " + format_double(residual) + " above tolerance",
                    trace);
            }
            x = std::move(check); // keep the extra evaluation as progress
            prev_step = residual;
            prev_ratio = -1.0;
            best_step = residual;
            best_k = k;
            continue;
        }
        prev_ratio = ratio;
        prev_step = step;
        x = std::move(next);
    }
    trace.status = SolveStatus::MaxIter;
    throw MaxIterExceeded("deform_solve: no convergence within " + std::to_string(cfg.max_iter) +
                              " iterations (last step " +
                              format_double(trace.steps.back().step) + ")",
                          trace);
}

} // namespace opmeans
