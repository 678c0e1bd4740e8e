// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "opmeans/means.hpp"
#include "opmeans/solver.hpp"

namespace opmeans {

/// Structural class membership of a recipe. The classes are generated from
/// base means by deformation (with the deforming mean restricted by its
/// classification) and, where allowed, convex composition:
///   in_M        — from {A, H, G} (power means included, being deformed
///                 arithmetic/harmonic means), any deformation, composition.
///   in_M_plus   — from {A, G, P(r>0)}, geometrically convex deformations,
///                 composition allowed.
///   in_M_minus  — adjoint dual of in_M_plus (harmonic side, geometrically
///                 concave deformations).
///   in_M0_plus  — from {A, G, P(r>0)}, power-monotone-increasing
///                 deformations only, no composition.
///   in_M0_minus — adjoint dual of in_M0_plus.
struct RecipeClass {
    bool in_M = false;
    bool in_M_plus = false;
    bool in_M_minus = false;
    bool in_M0_plus = false;
    bool in_M0_minus = false;
};

/// An operator mean of measures assembled from leaf means by deformation,
/// convex composition and adjoints. Immutable value type; copies share
/// structure.
///
/// Tolerance budgeting: nested evaluations run one decade tighter per
/// level, which keeps stacked solver error below the outer tolerance for
/// nesting depth up to about 5.
class MeanRecipe {
  public:
    enum class LeafKind { Arithmetic, Harmonic, Karcher, LogEuclidean, Power };

    static MeanRecipe arithmetic();
    static MeanRecipe harmonic();
    static MeanRecipe karcher();
    static MeanRecipe log_euclidean();
    /// Power mean leaf; r in [-1, 1] \ {0}.
    static MeanRecipe power(double r);
    /// Deformed mean: the solution X of X = base(X sigma mu). sigma must
    /// not be the left-trivial mean.
    static MeanRecipe deform(MeanRecipe base, RepresentingMean sigma);
    /// compose(outer; w1: M1, ..., wn: Mn)(mu) = outer(sum of w_j at M_j(mu)).
    static MeanRecipe compose(MeanRecipe outer, std::vector<Rational> weights,
                              std::vector<MeanRecipe> inner);
    /// Adjoint mean: base(mu^{-1})^{-1}.
    static MeanRecipe adjoint(MeanRecipe base);

    /// Canonical spec string (parse_recipe round-trips it).
    [[nodiscard]] std::string spec() const;
    /// Structural class tags; deforming means are classified numerically.
    [[nodiscard]] RecipeClass class_tags() const;

    friend HpdMatrix eval_recipe(const MeanRecipe& recipe, const DiscreteMeasure& mu,
                                 const SolverConfig& cfg);
    friend SolveResult eval_recipe_traced(const MeanRecipe& recipe, const DiscreteMeasure& mu,
                                          const SolverConfig& cfg);

    /// Tree node; defined in the implementation file.
    struct Node;

  private:
    explicit MeanRecipe(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Recursive evaluation: leaves dispatch to the concrete means, Deform
/// runs the fixed-point solver with the base recipe as inner evaluator,
/// Compose evaluates the inner recipes and applies the outer mean to the
/// resulting point-mass measure, Adjoint evaluates on the inverse measure
/// and inverts.
HpdMatrix eval_recipe(const MeanRecipe& recipe, const DiscreteMeasure& mu,
                      const SolverConfig& cfg = {});

/// Like eval_recipe, but also reports the convergence trace of the
/// outermost iterative solve. Closed-form recipes (arithmetic, harmonic,
/// log-Euclidean leaves) return an empty trace; adjoint and composition
/// pass the trace of the wrapped recipe through.
SolveResult eval_recipe_traced(const MeanRecipe& recipe, const DiscreteMeasure& mu,
                               const SolverConfig& cfg = {});

/// Bind a recipe and solver config into a reusable evaluator.
MeasureMean recipe_evaluator(MeanRecipe recipe, SolverConfig cfg = {});

/// Parses the recipe grammar:
///   A | H | G | LE | P(r) | deform(<recipe>, <sigma-spec>)
///   | compose(<recipe>; w1:<recipe>, ...) | adjoint(<recipe>)
/// with weights as exact rationals ("1/3") and sigma-specs per
/// parse_mean_spec.
MeanRecipe parse_recipe(std::string_view text);

} // namespace opmeans
