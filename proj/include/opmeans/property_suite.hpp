// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opmeans/majorization.hpp"
#include "opmeans/recipe.hpp"

namespace opmeans {

/// Outcome of one verification instance. margin is the signed distance to
/// the inequality boundary (negative = violated by that amount); for
/// equality checks it is tolerance minus deviation. Verdicts use additive
/// slack 1e-7 * (1 + max operand norm) unless the operation documents a
/// different policy, so solver residuals are absorbed and only genuine
/// violations fail.
struct CheckResult {
    bool pass = true;
    double margin = 0.0;
    std::string note;
};

/// Monotone-norm inequality: norm(M(mu)) <= M(norm-pushforward of mu),
/// the right side a 1x1 mean. Slack 1e-8 * (1 + scale).
CheckResult verify_norm_inequality(const MeanRecipe& m, const MonotoneNorm& norm,
                                   const DiscreteMeasure& mu, const SolverConfig& cfg = {});

/// Positive-map inequality: phi(M(mu)) <= M(phi-pushforward of mu) in the
/// Loewner order, for positive linear phi with phi(I) invertible.
/// Slack 1e-8 * (1 + scale).
CheckResult verify_positive_map(const MeanRecipe& m, const PositiveMap& phi,
                                const DiscreteMeasure& mu, const SolverConfig& cfg = {});

/// Power inequality for order-normalized means. For a recipe tagged
/// in_M0_plus, mu is rescaled so M(mu) >= I (homogeneity) and for each
/// r >= 1 both the implication M(mu^r) >= I and the strengthened form
/// M(mu^r) >= M(mu) are checked; dually (<=, norm normalization) for
/// in_M0_minus. Both directions run when both tags hold.
/// Throws ClassTagMismatch when neither tag is set.
CheckResult verify_ando_hiai(const MeanRecipe& m, const DiscreteMeasure& mu,
                             const std::vector<double>& r_list, const SolverConfig& cfg = {});

/// Two-sided power sandwich for deformed means, any congruence-invariant
/// recipe and any non-left-trivial sigma. With S = M_sigma(mu):
///   r >= 1:      lambda_min(S)^{r-1} S <= M_{sigma_{1/r}}(mu^r) <= ||S||^{r-1} S
///   0 < r <= 1:  with S = M_{sigma_r}(mu):
///                ||S||^{r-1} S <= M_sigma(mu^r) <= lambda_min(S)^{r-1} S.
CheckResult verify_modified_ando_hiai(const MeanRecipe& m, const RepresentingMean& sigma,
                                      const DiscreteMeasure& mu, double r,
                                      const SolverConfig& cfg = {});

/// Which eigenvalue-majorization statement to check against the
/// diagonalized measure lambda_* mu (the pushforward keeping each atom's
/// sorted eigenvalues as a diagonal matrix):
///   Arithmetic:     lambda(A(mu)) prec    A(lambda_* mu)          (strong)
///   Harmonic:       lambda(H(mu)) prec_w  H(lambda_* mu)
///   Power:          lambda(P_r(mu)) prec_w P_r(lambda_* mu), r in (0,1]
///   PowerInverse:   lambda(P_a(mu)^{-1}) prec_w P_a(lambda_* mu)^{-1},
///                   a in (-1,0) (complementary version)
///   GeometricChain: lambda(G(mu)) prec_log lambda(G(mu^{1/2})^2)
///                   prec_log lambda(G(mu^{1/4})^4) prec_log
///                   lambda(LE(mu)) prec_log lambda(G(lambda_* mu)).
/// Statements outside the proven ranges (e.g. Power with r in (-1,0))
/// throw UnsupportedMean.
enum class MajorizationCheck { Arithmetic, Harmonic, Power, PowerInverse, GeometricChain };

CheckResult verify_eigen_majorization(MajorizationCheck check, double param,
                                      const DiscreteMeasure& mu, const SolverConfig& cfg = {});

/// Two-variable base case: lambda(A sigma B) prec_w lambda(A) sigma
/// lambda(B) with the scalar mean applied entrywise to the descending
/// eigenvalue vectors.
CheckResult verify_two_variable_majorization(const RepresentingMean& sigma, const HpdMatrix& a,
                                             const HpdMatrix& b);

/// Convergence of G(mu^r)^{1/r} to the log-Euclidean mean as r decreases
/// (the gap shrinks like r^2 since the family is symmetric under
/// r -> -r). Passes when the final gap is below 10 * cfg.residual_tol and
/// the gaps trend downward. Inner Karcher solves run at r-scaled
/// tolerances because the 1/r power magnifies their residual.
struct LieTrotterReport {
    struct Row {
        double r;
        double gap; // d_T(G(mu^r)^{1/r}, LE(mu))
    };
    std::vector<Row> rows;
    bool pass = false;
    double final_gap = 0.0;
};

/// Default exponent sequence 2^{-4}, 2^{-6}, 2^{-8}, 2^{-10}.
std::vector<double> default_lie_trotter_sequence();

LieTrotterReport verify_lie_trotter(const DiscreteMeasure& mu,
                                    const std::vector<double>& r_sequence
                                    = default_lie_trotter_sequence(),
                                    const SolverConfig& cfg = {});

/// Determinant inequality det^{1/N} M(mu) >= M(det^{1/N}-pushforward)
/// for recipes tagged in_M_plus, reversed for in_M_minus; recipes with
/// both tags (the Karcher mean) therefore get equality within slack.
/// Throws ClassTagMismatch when neither tag is set.
CheckResult verify_minkowski(const MeanRecipe& m, const DiscreteMeasure& mu,
                             const SolverConfig& cfg = {});

/// A failing instance dumped into the report: the measure, the recipe
/// spec in play, and the observed margin.
struct SuiteWitness {
    int trial = 0;
    nlohmann::ordered_json measure;
    std::string recipe;
    double margin = 0.0;
    std::string note;
};

struct PropertyReport {
    std::string property;
    std::string reference;
    int trials = 0;
    int failures = 0;
    double worst_margin = 0.0;
    std::vector<SuiteWitness> witnesses;
};

/// Names of every registered property, in report order.
std::vector<std::string> suite_property_names();

struct SuiteConfig {
    std::uint64_t seed = 0;
    std::vector<Eigen::Index> dims = {1, 2, 3};
    std::vector<int> atom_counts = {2, 3};
    std::vector<double> epsilons = {0.1, 0.01};
    int trials = 50;
    /// Property names to run, defaulting to all of them. An explicitly
    /// empty list runs nothing and produces an empty report.
    std::vector<std::string> properties = suite_property_names();
    /// Worker threads; 0 = OPMEANS_THREADS environment variable, falling
    /// back to the hardware count.
    int threads = 0;
    /// Witnesses kept per property.
    int max_witnesses = 3;
    /// Deliberate defect switch for self-testing the failure reporting:
    /// "flip-amh" reverses the arithmetic bound in the amh-sandwich
    /// property, which must produce failures on noncommuting instances.
    std::string defect;
    SolverConfig solver;
};

struct SuiteReport {
    std::vector<PropertyReport> properties;
    int total_failures = 0;
};

/// Runs the selected properties over seeded random instances. Per-trial
/// seeds derive from (seed, property, trial), so the report is
/// byte-identical for a given config regardless of thread count. Failures
/// are report content, not exceptions; convergence errors inside a trial
/// count as failures with the message recorded.
SuiteReport run_suite(const SuiteConfig& config);

/// Report serialization: [{property, paper_ref, trials, failures,
/// worst_margin, witnesses: [{trial, margin, note, recipe, measure}]}].
nlohmann::ordered_json suite_report_to_json(const SuiteReport& report);

/// Reads SuiteConfig from JSON; unknown keys are rejected. All fields
/// optional: {seed, dims, atoms, epsilons, trials, properties, threads,
/// max_witnesses, defect, iter_tol, residual_tol, max_iter}.
SuiteConfig suite_config_from_json(const nlohmann::json& j);

} // namespace opmeans
