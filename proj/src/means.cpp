// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/means.hpp"

#include <cmath>

namespace opmeans {

namespace {

constexpr double kSmallExponentSwitch = 0.125;

Eigen::MatrixXd whitened_power(const HpdMatrix& x_inv_sqrt, const HpdMatrix& a, double p,
                               const EigOptions& opt) {
    Eigen::MatrixXd w = x_inv_sqrt.mat() * a.mat() * x_inv_sqrt.mat();
    w = ((w + w.transpose()) / 2.0).eval();
    return fn_calculus_sym(HpdMatrix(w, opt), [p](double t) { return std::pow(t, p); });
}

/// Residual of the power-mean equation: integral (X^{-1/2}AX^{-1/2})^r dmu - I.
Eigen::MatrixXd power_equation_residual(const HpdMatrix& x, double r,
                                        const DiscreteMeasure& mu) {
    const HpdMatrix x_inv_sqrt = matrix_power(x, -0.5);
    Eigen::MatrixXd acc = integrate_sym(mu, [&](const HpdMatrix& a) {
        return whitened_power(x_inv_sqrt, a, r, x.options());
    });
    return acc - Eigen::MatrixXd::Identity(x.dim(), x.dim());
}

/// Scaled iteration for small positive exponents. The plain deformation
/// iteration contracts like 1 - s, hopeless for s ~ 2^{-20}; rescaling the
/// update exponent by 1/s removes that factor:
///     W(X) = integral (X^{-1/2} A X^{-1/2})^s dmu,
///     X <- X^{1/2} W^{theta/s} X^{1/2},
/// which solves the same residual equation W(X) = I and tends to the
/// Karcher update as s -> 0. Convergence is certified by the normalized
/// residual (1/s)·||log W||, which equals the Thompson step at theta = 1.
/// Near s ~ 2^{-20} the residual bottoms out at the float noise floor
/// (~1e-15/s); a plateau within 100x the target is accepted since it
/// cannot be improved in double precision.
SolveResult power_mean_small(double s, const DiscreteMeasure& mu, const SolverConfig& cfg) {
    HpdMatrix x = cfg.start == SolverConfig::Start::Given && cfg.start_value
                      ? *cfg.start_value
                      : log_euclidean_mean(mu);
    ConvergenceTrace trace;

    auto normalized_residual = [&](const HpdMatrix& point) {
        const HpdMatrix inv_sqrt = matrix_power(point, -0.5);
        Eigen::MatrixXd w = integrate_sym(mu, [&](const HpdMatrix& a) {
            return whitened_power(inv_sqrt, a, s, point.options());
        });
        const auto sp = eig_sym(w, point.options());
        double worst = 0.0;
        for (Eigen::Index i = 0; i < sp.values.size(); ++i) {
            if (!(sp.values[i] > 0.0)) {
                throw NotPositiveDefinite("power_mean: residual integral lost positivity");
            }
            worst = std::max(worst, std::abs(std::log(sp.values[i])));
        }
        return std::make_pair(worst / s, w);
    };

    auto [rho, w] = normalized_residual(x);
    double theta = 1.0;
    double best_rho = rho;
    int stalled = 0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        if (rho <= cfg.residual_tol) {
            trace.status = SolveStatus::Converged;
            return {x, std::move(trace)};
        }
        const HpdMatrix rt = matrix_sqrt(x);
        const HpdMatrix w_pow =
            fn_calculus(HpdMatrix(w, x.options()),
                        [&](double t) { return std::pow(t, theta / s); });
        Eigen::MatrixXd cand = rt.mat() * w_pow.mat() * rt.mat();
        cand = ((cand + cand.transpose()) / 2.0).eval();
        HpdMatrix x_try(cand, x.options());
        auto [rho_try, w_try] = normalized_residual(x_try);
        trace.steps.push_back({k, theta * rho, rho_try});
        if (rho_try < rho) {
            x = std::move(x_try);
            rho = rho_try;
            w = std::move(w_try);
            theta = std::min(1.0, theta * 2.0);
        } else {
            theta /= 2.0;
        }
        if (rho < best_rho * 0.99) {
            best_rho = rho;
            stalled = 0;
        } else if (++stalled >= 8) {
            // Float noise floor reached; accept only well under a decade
            // of the criterion scale.
            if (rho <= 100.0 * cfg.residual_tol) {
                trace.status = SolveStatus::Converged;
                return {x, std::move(trace)};
            }
            break;
        }
    }
    trace.status = SolveStatus::MaxIter;
    throw MaxIterExceeded("power_mean: scaled iteration stalled at normalized residual " +
                              format_double(rho) + " for exponent " + format_double(s),
                          trace);
}

} // namespace

HpdMatrix arithmetic_mean(const DiscreteMeasure& mu) {
    Eigen::MatrixXd acc = integrate_sym(mu, [](const HpdMatrix& a) { return a.mat(); });
    return HpdMatrix(acc, mu.atom(0).options());
}

HpdMatrix harmonic_mean(const DiscreteMeasure& mu) {
    Eigen::MatrixXd acc =
        integrate_sym(mu, [](const HpdMatrix& a) { return matrix_inv(a).mat(); });
    return matrix_inv(HpdMatrix(acc, mu.atom(0).options()));
}

HpdMatrix log_euclidean_mean(const DiscreteMeasure& mu) {
    Eigen::MatrixXd acc =
        integrate_sym(mu, [](const HpdMatrix& a) { return matrix_log(a); });
    return matrix_exp(acc, mu.atom(0).options());
}

SolveResult power_mean(double r, const DiscreteMeasure& mu, const SolverConfig& cfg) {
    if (!(r >= -1.0 && r <= 1.0) || r == 0.0) {
        throw ParamOutOfRange("power_mean: exponent must lie in [-1,1] minus 0, got " +
                              format_double(r));
    }
    cfg.validate();

    SolveResult result = [&]() -> SolveResult {
        if (std::abs(r) >= kSmallExponentSwitch) {
            if (r > 0.0) {
                return deform_solve([](const DiscreteMeasure& m) { return arithmetic_mean(m); },
                                    RepresentingMean::geometric(r), mu, cfg);
            }
            return deform_solve([](const DiscreteMeasure& m) { return harmonic_mean(m); },
                                RepresentingMean::geometric(-r), mu, cfg);
        }
        if (r > 0.0) return power_mean_small(r, mu, cfg);
        // P_{-s}(mu) = P_s(mu^{-1})^{-1}.
        SolverConfig flipped = cfg;
        if (cfg.start == SolverConfig::Start::Given && cfg.start_value) {
            flipped.start_value = matrix_inv(*cfg.start_value);
        }
        SolveResult inner = power_mean_small(-r, pf_inverse(mu), flipped);
        return {matrix_inv(inner.value), std::move(inner.trace)};
    }();

    const double res = sym_operator_norm(power_equation_residual(result.value, r, mu));
    if (res > cfg.residual_tol) {
        // One retry a hundred times tighter before giving up.
        SolverConfig tight = cfg;
        tight.iter_tol /= 100.0;
        tight.start = SolverConfig::Start::Given;
        tight.start_value = result.value;
        if (std::abs(r) >= kSmallExponentSwitch) {
            result = r > 0.0
                         ? deform_solve(
                               [](const DiscreteMeasure& m) { return arithmetic_mean(m); },
                               RepresentingMean::geometric(r), mu, tight)
                         : deform_solve(
                               [](const DiscreteMeasure& m) { return harmonic_mean(m); },
                               RepresentingMean::geometric(-r), mu, tight);
        } else if (r > 0.0) {
            result = power_mean_small(r, mu, tight);
        } else {
            tight.start_value = matrix_inv(result.value);
            SolveResult inner = power_mean_small(-r, pf_inverse(mu), tight);
            result = {matrix_inv(inner.value), std::move(inner.trace)};
        }
        const double res2 = sym_operator_norm(power_equation_residual(result.value, r, mu));
        if (res2 > cfg.residual_tol) {
            throw NoConvergence("power_mean: equation residual " + format_double(res2) +
                                " exceeds tolerance " + format_double(cfg.residual_tol));
        }
    }
    return result;
}

SolveResult karcher_mean(const DiscreteMeasure& mu, const SolverConfig& cfg) {
    cfg.validate();
    HpdMatrix x = cfg.start == SolverConfig::Start::Given && cfg.start_value
                      ? *cfg.start_value
                      : log_euclidean_mean(mu);

    // Gradient field of the squared-distance objective at `point`,
    // together with the spread of the measure as seen from there (the
    // largest whitened log norm). The spread bounds the Hessian spectrum
    // from above by 1 + spread, which fixes the safe step size below.
    struct Field {
        Eigen::MatrixXd s;
        double rho = 0.0;
        double spread = 0.0;
    };
    auto residual_field = [&](const HpdMatrix& point) {
        const HpdMatrix inv_sqrt = matrix_power(point, -0.5);
        Field out;
        out.s = Eigen::MatrixXd::Zero(point.dim(), point.dim());
        for (std::size_t i = 0; i < mu.size(); ++i) {
            Eigen::MatrixXd w = inv_sqrt.mat() * mu.atom(i).mat() * inv_sqrt.mat();
            w = ((w + w.transpose()) / 2.0).eval();
            const Eigen::MatrixXd lg = matrix_log(HpdMatrix(w, point.options()));
            out.spread = std::max(out.spread, sym_operator_norm(lg));
            out.s += mu.weight_double(i) * lg;
        }
        out.s = ((out.s + out.s.transpose()) / 2.0).eval();
        out.rho = sym_operator_norm(out.s);
        return out;
    };

    ConvergenceTrace trace;
    Field f = residual_field(x);
    double damping = 1.0;
    double best_rho = f.rho;
    int stalled = 0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        if (f.rho <= cfg.residual_tol) {
            trace.status = SolveStatus::Converged;
            return {x, std::move(trace)};
        }
        // Steepest descent on a convex objective whose Hessian spectrum
        // lies in [1, 1 + spread]: step 2/(2 + spread) is safely inside
        // the stable range and degrades gracefully to the exact
        // one-step solve (step 1) for commuting measures.
        const double theta = damping * std::min(1.0, 2.0 / (2.0 + f.spread));
        const HpdMatrix rt = matrix_sqrt(x);
        const HpdMatrix stepper = matrix_exp(Eigen::MatrixXd(theta * f.s), x.options());
        Eigen::MatrixXd cand = rt.mat() * stepper.mat() * rt.mat();
        cand = ((cand + cand.transpose()) / 2.0).eval();
        HpdMatrix x_try(cand, x.options());
        Field f_try = residual_field(x_try);
        trace.steps.push_back({k, theta * f.rho, f_try.rho});
        if (f_try.rho < f.rho) {
            x = std::move(x_try);
            f = std::move(f_try);
            damping = std::min(1.0, damping * 1.4);
        } else {
            damping /= 2.0;
            if (damping < 1e-8) {
                // No step of any size improves the gradient norm: the
                // rounding floor has been reached. Same acceptance rule
                // as the stall guard below.
                if (f.rho <= 100.0 * cfg.residual_tol) {
                    trace.status = SolveStatus::Converged;
                    return {x, std::move(trace)};
                }
                trace.status = SolveStatus::MaxIter;
                throw MaxIterExceeded("karcher_mean: damping collapsed at residual " +
                                          format_double(f.rho),
                                      trace);
            }
        }
        if (f.rho < best_rho * 0.99) {
            best_rho = f.rho;
            stalled = 0;
        } else if (++stalled >= 30) {
            // The gradient norm has hovered for many iterations: the
            // rounding floor of the residual field is above the demanded
            // tolerance. Accept only well under a decade of the criterion
            // scale; otherwise fail fast instead of burning the budget.
            if (f.rho <= 100.0 * cfg.residual_tol) {
                trace.status = SolveStatus::Converged;
                return {x, std::move(trace)};
            }
            trace.status = SolveStatus::MaxIter;
            throw MaxIterExceeded("karcher_mean: iteration stalled at residual " +
                                      format_double(f.rho),
                                  trace);
        }
    }
    trace.status = SolveStatus::MaxIter;
    throw MaxIterExceeded("karcher_mean: no convergence within " + std::to_string(cfg.max_iter) +
                              " iterations (residual " + format_double(f.rho) + ")",
                          trace);
}

std::vector<double> default_power_limit_sequence() {
    std::vector<double> out;
    for (int k = 1; k <= 20; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
}

PowerLimitReport karcher_via_power_limit(const DiscreteMeasure& mu,
                                         const std::vector<double>& r_sequence,
                                         const SolverConfig& cfg) {
    if (r_sequence.empty()) throw EmptyInput("karcher_via_power_limit: empty exponent sequence");
    for (std::size_t i = 0; i < r_sequence.size(); ++i) {
        const double r = r_sequence[i];
        if (!(r > 0.0 && r <= 1.0) || (i > 0 && r >= r_sequence[i - 1])) {
            throw ParamOutOfRange(
                "karcher_via_power_limit: exponents must decrease within (0, 1]");
        }
    }

    std::optional<HpdMatrix> upper, lower;
    std::vector<PowerLimitReport::Row> rows;
    bool monotone_ok = true;
    double prev_width = std::numeric_limits<double>::infinity();
    for (double r : r_sequence) {
        SolverConfig up_cfg = cfg;
        SolverConfig lo_cfg = cfg;
        if (upper) {
            up_cfg.start = SolverConfig::Start::Given;
            up_cfg.start_value = upper;
            lo_cfg.start = SolverConfig::Start::Given;
            lo_cfg.start_value = lower;
        }
        upper = power_mean(r, mu, up_cfg).value;
        lower = power_mean(-r, mu, lo_cfg).value;
        const double width = thompson_distance(*lower, *upper);
        rows.push_back({r, width});
        if (width > prev_width + 1e-9) monotone_ok = false;
        prev_width = width;
    }
    HpdMatrix mid = RepresentingMean::geometric(0.5).apply(*lower, *upper);
    return PowerLimitReport{std::move(mid), std::move(rows), monotone_ok};
}

std::vector<double> default_harmonic_limit_sequence() {
    std::vector<double> out;
    for (int k = 1; k <= 8; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
}

HarmonicLimitReport harmonic_limit_check(const DiscreteMeasure& mu,
                                         const std::vector<double>& s_sequence,
                                         const SolverConfig& cfg) {
    if (s_sequence.empty()) throw EmptyInput("harmonic_limit_check: empty sequence");
    for (std::size_t i = 1; i < s_sequence.size(); ++i) {
        if (s_sequence[i] >= s_sequence[i - 1]) {
            throw ParamOutOfRange("harmonic_limit_check: sequence must decrease");
        }
    }
    const HpdMatrix target = harmonic_mean(mu);
    const auto arith = [](const DiscreteMeasure& m) { return arithmetic_mean(m); };

    HarmonicLimitReport report;
    std::optional<HpdMatrix> prev;
    for (double s : s_sequence) {
        SolverConfig local = cfg;
        if (prev) {
            local.start = SolverConfig::Start::Given;
            local.start_value = prev;
        }
        HpdMatrix value = deform_solve(arith, RepresentingMean::harmonic(s), mu, local).value;
        report.rows.push_back({s, thompson_distance(value, target)});
        if (prev) {
            const double slack = 1e-8 * std::max(1.0, prev->lambda_max());
            if (!loewner_leq(value, *prev, slack)) {
                report.monotone_ok = false;
                return report;
            }
        }
        prev = std::move(value);
    }
    report.monotone_ok = true;

    // Fit gap ~ C * s on all but the final point, then require the final
    // gap to respect the extrapolated rate with a factor-2 cushion.
    double c_hat = 0.0;
    int count = 0;
    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
        c_hat += report.rows[i].gap / report.rows[i].s;
        ++count;
    }
    if (count > 0) c_hat /= count;
    report.c_hat = c_hat;
    const auto& last = report.rows.back();
    report.terminal_ok = last.gap <= 2.0 * c_hat * last.s + 1e-10;
    return report;
}

} // namespace opmeans
