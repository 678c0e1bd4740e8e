// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/stochastic_order.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "opmeans/detail/maxflow.hpp"
#include "opmeans/errors.hpp"

namespace opmeans {

using detail::MaxFlow;
using detail::common_denominator;
using detail::scaled_units;

OrderVerdict stochastic_leq(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double slack) {
    if (mu.dim() != nu.dim()) {
        throw DimensionMismatch("stochastic_leq: dimensions " + std::to_string(mu.dim()) +
                                " and " + std::to_string(nu.dim()) + " differ");
    }
    const int m = static_cast<int>(mu.size());
    const int n = static_cast<int>(nu.size());
    const int source = 0;
    const int sink = m + n + 1;
    const long long d = common_denominator(mu, nu);

    std::vector<std::vector<bool>> admissible(m, std::vector<bool>(n, false));
    MaxFlow flow(m + n + 2);
    for (int i = 0; i < m; ++i) flow.add_edge(source, 1 + i, scaled_units(mu.weight(i), d));
    for (int j = 0; j < n; ++j) flow.add_edge(1 + m + j, sink, scaled_units(nu.weight(j), d));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            if (loewner_leq(mu.atom(i), nu.atom(j), slack)) {
                admissible[i][j] = true;
                flow.add_edge(1 + i, 1 + m + j, d + 1); // effectively unbounded
            }
        }
    }
    const long long value = flow.run(source, sink);
    OrderVerdict verdict;
    verdict.leq = (value == d);
    if (verdict.leq) {
        Coupling c;
        c.pi.assign(m, std::vector<Rational>(n, Rational(0)));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                if (!admissible[i][j]) continue;
                // Flow pushed equals initial capacity minus what remains.
                const long long sent = (d + 1) - flow.residual(1 + i, 1 + m + j);
                if (sent > 0) c.pi[i][j] = Rational(sent, d);
            }
        }
        verdict.coupling = std::move(c);
    } else {
        const auto seen = flow.reachable(source);
        CutCertificate cut;
        cut.mu_mass = Rational(0);
        cut.nu_mass = Rational(0);
        std::vector<bool> in_ns(n, false);
        for (int i = 0; i < m; ++i) {
            if (!seen[1 + i]) continue;
            cut.mu_side.push_back(static_cast<std::size_t>(i));
            cut.mu_mass = cut.mu_mass + mu.weight(i);
            for (int j = 0; j < n; ++j)
                if (admissible[i][j]) in_ns[j] = true;
        }
        for (int j = 0; j < n; ++j) {
            if (!in_ns[j]) continue;
            cut.nu_reachable.push_back(static_cast<std::size_t>(j));
            cut.nu_mass = cut.nu_mass + nu.weight(j);
        }
        verdict.certificate = std::move(cut);
    }
    return verdict;
}

double default_order_slack(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    double top = 0.0;
    for (const auto& a : mu.atoms()) top = std::max(top, a.lambda_max());
    for (const auto& b : nu.atoms()) top = std::max(top, b.lambda_max());
    return 1e-9 * (1.0 + top);
}

OrderVerdict stochastic_leq(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return stochastic_leq(mu, nu, default_order_slack(mu, nu));
}

std::optional<FalsifierViolation> monotone_function_falsifier(const DiscreteMeasure& mu,
                                                              const DiscreteMeasure& nu,
                                                              int trials, std::uint64_t seed) {
    const Eigen::Index n = mu.dim();
    if (nu.dim() != n) {
        throw DimensionMismatch("monotone_function_falsifier: dimensions differ");
    }
    struct Shape {
        const char* name;
        double (*g)(double);
    };
    static const Shape kShapes[] = {
        {"x", [](double x) { return x; }},
        {"x^2", [](double x) { return x * x; }},
        {"sqrt(x)", [](double x) { return std::sqrt(x); }},
        {"log(1+x)", [](double x) { return std::log1p(x); }},
        {"x/(1+x)", [](double x) { return x / (1.0 + x); }},
    };
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    constexpr double kTol = 1e-9;

    auto check = [&](const Eigen::MatrixXd& k_sqrt, const Shape& shape,
                     const std::string& k_desc) -> std::optional<FalsifierViolation> {
        auto f = [&](const HpdMatrix& a) {
            Eigen::MatrixXd conj = k_sqrt * a.mat() * k_sqrt;
            conj = ((conj + conj.transpose()) / 2.0).eval();
            const auto sp = eig_sym(conj, a.options());
            double acc = 0.0;
            for (Eigen::Index i = 0; i < sp.values.size(); ++i)
                acc += shape.g(std::max(sp.values[i], 0.0));
            return acc;
        };
        const double lhs = integrate(mu, f);
        const double rhs = integrate(nu, f);
        if (lhs > rhs + kTol) {
            return FalsifierViolation{
                "f(A) = tr g(K^{1/2} A K^{1/2}) with g = " + std::string(shape.name) +
                    ", K = " + k_desc,
                lhs, rhs};
        }
        return std::nullopt;
    };

    int done = 0;
    // Canonical test functions first: K = I and the coordinate projections,
    // each with g = identity. These decide the obvious diagonal cases
    // deterministically.
    for (Eigen::Index axis = -1; axis < n && done < trials; ++axis, ++done) {
        Eigen::MatrixXd k_sqrt;
        std::string desc;
        if (axis < 0) {
            k_sqrt = Eigen::MatrixXd::Identity(n, n);
            desc = "I";
        } else {
            k_sqrt = Eigen::MatrixXd::Zero(n, n);
            k_sqrt(axis, axis) = 1.0;
            desc = "e_" + std::to_string(axis + 1) + " e_" + std::to_string(axis + 1) + "^T";
        }
        if (auto hit = check(k_sqrt, kShapes[0], desc)) return hit;
    }
    for (; done < trials; ++done) {
        Eigen::MatrixXd g(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) g(r, c) = gauss(rng);
        Eigen::MatrixXd k = g.transpose() * g / static_cast<double>(n) +
                            1e-3 * Eigen::MatrixXd::Identity(n, n);
        k = ((k + k.transpose()) / 2.0).eval();
        const Eigen::MatrixXd k_sqrt = matrix_sqrt(HpdMatrix(k)).mat();
        const Shape& shape = kShapes[static_cast<std::size_t>(done) % std::size(kShapes)];
        if (auto hit = check(k_sqrt, shape, "random PSD (trial " + std::to_string(done) + ")"))
            return hit;
    }
    return std::nullopt;
}

double delta_T(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double tol) {
    if (mu.dim() != nu.dim()) {
        throw DimensionMismatch("delta_T: dimensions " + std::to_string(mu.dim()) + " and " +
                                std::to_string(nu.dim()) + " differ");
    }
    if (!(tol > 0.0)) throw ParamOutOfRange("delta_T: tol must be positive");

    auto feasible = [&](double r) {
        const DiscreteMeasure lower = pf_scale(nu, std::exp(-r));
        const DiscreteMeasure upper = pf_scale(nu, std::exp(r));
        return stochastic_leq(lower, mu).leq && stochastic_leq(mu, upper).leq;
    };

    if (feasible(0.0)) return 0.0;

    const double eps =
        std::min(sigma_epsilon_of(mu).epsilon, sigma_epsilon_of(nu).epsilon);
    double max_dt = 0.0;
    for (const auto& a : mu.atoms())
        for (const auto& b : nu.atoms()) max_dt = std::max(max_dt, thompson_distance(a, b));
    double hi = max_dt + 2.0 * std::log(1.0 / eps);
    // The bound brackets the infimum by construction; guard against float
    // corner cases all the same.
    int expand = 0;
    while (!feasible(hi)) {
        if (++expand > 3) throw NoConvergence("delta_T: search bound infeasible");
        hi *= 2.0;
    }
    double lo = 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

OrderAxiomsReport measure_order_axioms(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       double lam) {
    if (!(lam > 0.0)) throw ParamOutOfRange("measure_order_axioms: lam must be positive");
    OrderAxiomsReport report;

    report.reflexive = stochastic_leq(mu, mu).leq && stochastic_leq(nu, nu).leq;
    if (!report.reflexive) report.violations.emplace_back("reflexivity failed");

    // Transitivity probe along a scaled chain mu <= c.mu <= c^2.mu, c > 1.
    const double c = 1.0 + lam;
    const DiscreteMeasure step1 = pf_scale(mu, c);
    const DiscreteMeasure step2 = pf_scale(mu, c * c);
    const bool link1 = stochastic_leq(mu, step1).leq;
    const bool link2 = stochastic_leq(step1, step2).leq;
    const bool ends = stochastic_leq(mu, step2).leq;
    report.transitive = !(link1 && link2) || ends;
    if (!report.transitive) report.violations.emplace_back("transitivity failed on scaled chain");

    // Antisymmetry: mutual dominance must force equal weighted supports.
    report.antisymmetry_applicable =
        stochastic_leq(mu, nu).leq && stochastic_leq(nu, mu).leq;
    report.antisymmetric = true;
    if (report.antisymmetry_applicable) {
        const double tol = 1e-7;
        // Compare cluster masses: for every atom, the total mass its
        // tol-neighborhood carries must agree across the two measures.
        auto mass_near = [tol](const DiscreteMeasure& m, const HpdMatrix& center) {
            Rational total(0);
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (center.dim() == m.dim() && thompson_distance(m.atom(i), center) <= tol)
                    total = total + m.weight(i);
            }
            return total;
        };
        auto side = [&](const DiscreteMeasure& a, const DiscreteMeasure& b) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (mass_near(a, a.atom(i)) != mass_near(b, a.atom(i))) return false;
            }
            return true;
        };
        report.antisymmetric = side(mu, nu) && side(nu, mu);
        if (!report.antisymmetric)
            report.violations.emplace_back("antisymmetry failed: supports differ as weighted sets");
    }
    return report;
}

} // namespace opmeans
