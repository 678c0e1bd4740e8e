// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "opmeans/random_instances.hpp"
#include "opmeans/recipe.hpp"

using namespace opmeans;

namespace {

HpdMatrix scalar(double v) { return HpdMatrix(Eigen::MatrixXd::Constant(1, 1, v)); }

DiscreteMeasure one_nine() {
    return DiscreteMeasure({scalar(1.0), scalar(9.0)}, {Rational(1, 2), Rational(1, 2)});
}

} // namespace

TEST_CASE("spec strings round-trip through the parser") {
    for (const std::string spec : {
             "A",
             "H",
             "G",
             "LE",
             "P(0.5)",
             "P(-0.25)",
             "deform(H, geom(0.5))",
             "deform(A, pow(geom(0.5), 0.5))",
             "compose(G; 1/2:A, 1/2:H)",
             "compose(A; 1/3:H, 1/3:G, 1/3:P(0.5))",
             "adjoint(deform(A, geom(0.25)))",
         }) {
        CAPTURE(spec);
        CHECK(parse_recipe(spec).spec() == spec);
    }
}

TEST_CASE("malformed specs are rejected with parse errors") {
    for (const std::string bad : {
             "", "Q", "P()", "P(0)", "P(2)", "deform(A)", "deform(A, left)",
             "compose(G; )", "compose(G; 1/2:A)", "compose(G; 1/2:A, 1/3:H)",
             "compose(G; 0:A, 1:H)", "adjoint()", "A extra",
         }) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_recipe(bad), InputError);
    }
}

TEST_CASE("leaf recipes evaluate to the concrete means") {
    std::mt19937_64 rng(79);
    const DiscreteMeasure mu = random_measure(3, 3, 0.1, rng);
    CHECK(thompson_distance(eval_recipe(MeanRecipe::arithmetic(), mu), arithmetic_mean(mu)) <=
          1e-12);
    CHECK(thompson_distance(eval_recipe(MeanRecipe::harmonic(), mu), harmonic_mean(mu)) <= 1e-12);
    CHECK(thompson_distance(eval_recipe(MeanRecipe::log_euclidean(), mu),
                            log_euclidean_mean(mu)) <= 1e-12);
    CHECK(thompson_distance(eval_recipe(MeanRecipe::karcher(), mu), karcher_mean(mu).value) <=
          1e-10);
    CHECK(thompson_distance(eval_recipe(MeanRecipe::power(0.5), mu),
                            power_mean(0.5, mu).value) <= 1e-10);
    CHECK_THROWS_AS(MeanRecipe::power(0.0), RecipeInvalid);
    CHECK_THROWS_AS(MeanRecipe::power(1.5), RecipeInvalid);
}

TEST_CASE("deformations reproduce the power means and respect duality") {
    std::mt19937_64 rng(83);
    const DiscreteMeasure mu = random_measure(2, 3, 0.1, rng);

    const HpdMatrix p_half = power_mean(0.5, mu).value;
    const HpdMatrix via_deform =
        eval_recipe(MeanRecipe::deform(MeanRecipe::arithmetic(), RepresentingMean::geometric(0.5)),
                    mu);
    CHECK(thompson_distance(via_deform, p_half) <= 1e-9);

    // Deforming the harmonic mean by #_{1/2} lands on P_{-1/2}.
    const HpdMatrix via_harm =
        eval_recipe(MeanRecipe::deform(MeanRecipe::harmonic(), RepresentingMean::geometric(0.5)),
                    mu);
    CHECK(thompson_distance(via_harm, power_mean(-0.5, mu).value) <= 1e-9);

    CHECK_THROWS_AS(MeanRecipe::deform(MeanRecipe::arithmetic(), RepresentingMean::left()),
                    RecipeInvalid);
}

TEST_CASE("adjoint swaps the arithmetic and harmonic sides") {
    std::mt19937_64 rng(89);
    const DiscreteMeasure mu = random_measure(3, 2, 0.1, rng);
    CHECK(thompson_distance(eval_recipe(MeanRecipe::adjoint(MeanRecipe::arithmetic()), mu),
                            harmonic_mean(mu)) <= 1e-11);
    CHECK(thompson_distance(eval_recipe(MeanRecipe::adjoint(MeanRecipe::harmonic()), mu),
                            arithmetic_mean(mu)) <= 1e-11);
    // The barycenter is self-adjoint.
    CHECK(thompson_distance(eval_recipe(MeanRecipe::adjoint(MeanRecipe::karcher()), mu),
                            karcher_mean(mu).value) <= 1e-8);
}

TEST_CASE("composition evaluates the outer mean on the inner results") {
    std::mt19937_64 rng(97);
    const DiscreteMeasure mu = random_measure(2, 3, 0.1, rng);
    const MeanRecipe comp = MeanRecipe::compose(
        MeanRecipe::arithmetic(), {Rational(1, 4), Rational(3, 4)},
        {MeanRecipe::arithmetic(), MeanRecipe::harmonic()});
    const HpdMatrix got = eval_recipe(comp, mu);
    const Eigen::MatrixXd expect =
        0.25 * arithmetic_mean(mu).mat() + 0.75 * harmonic_mean(mu).mat();
    CHECK((got.mat() - expect).cwiseAbs().maxCoeff() <= 1e-11);

    // A composition with a single unit weight is the inner mean itself.
    const MeanRecipe unit =
        MeanRecipe::compose(MeanRecipe::karcher(), {Rational(1)}, {MeanRecipe::harmonic()});
    CHECK(thompson_distance(eval_recipe(unit, mu), harmonic_mean(mu)) <= 1e-10);

    CHECK_THROWS_AS(MeanRecipe::compose(MeanRecipe::arithmetic(), {}, {}), RecipeInvalid);
    CHECK_THROWS_AS(MeanRecipe::compose(MeanRecipe::arithmetic(), {Rational(1)},
                                        {MeanRecipe::arithmetic(), MeanRecipe::harmonic()}),
                    RecipeInvalid);
    CHECK_THROWS_AS(MeanRecipe::compose(MeanRecipe::arithmetic(),
                                        {Rational(1, 2), Rational(1, 3)},
                                        {MeanRecipe::arithmetic(), MeanRecipe::harmonic()}),
                    RecipeInvalid);
    CHECK_THROWS_AS(MeanRecipe::compose(MeanRecipe::arithmetic(), {Rational(0), Rational(1)},
                                        {MeanRecipe::arithmetic(), MeanRecipe::harmonic()}),
                    RecipeInvalid);
}

TEST_CASE("class tags follow the structural rules") {
    const RecipeClass a = MeanRecipe::arithmetic().class_tags();
    CHECK(a.in_M);
    CHECK(a.in_M_plus);
    CHECK(a.in_M0_plus);
    CHECK_FALSE(a.in_M_minus);

    const RecipeClass h = MeanRecipe::harmonic().class_tags();
    CHECK(h.in_M);
    CHECK(h.in_M_minus);
    CHECK(h.in_M0_minus);
    CHECK_FALSE(h.in_M_plus);

    const RecipeClass g = MeanRecipe::karcher().class_tags();
    CHECK(g.in_M);
    CHECK(g.in_M_plus);
    CHECK(g.in_M_minus);
    CHECK(g.in_M0_plus);
    CHECK(g.in_M0_minus);

    const RecipeClass p = MeanRecipe::power(0.5).class_tags();
    CHECK(p.in_M_plus);
    CHECK(p.in_M0_plus);
    CHECK_FALSE(p.in_M0_minus);

    // Composition keeps the convex classes but leaves the M0 classes.
    const RecipeClass c =
        MeanRecipe::compose(MeanRecipe::arithmetic(), {Rational(1, 2), Rational(1, 2)},
                            {MeanRecipe::arithmetic(), MeanRecipe::power(0.5)})
            .class_tags();
    CHECK(c.in_M_plus);
    CHECK_FALSE(c.in_M0_plus);
}

TEST_CASE("traced evaluation reports the outermost solve") {
    std::mt19937_64 rng(101);
    const DiscreteMeasure mu = random_measure(2, 2, 0.2, rng);

    // Closed-form leaves have nothing to trace.
    CHECK(eval_recipe_traced(MeanRecipe::arithmetic(), mu).trace.steps.empty());
    CHECK(eval_recipe_traced(MeanRecipe::log_euclidean(), mu).trace.steps.empty());
    // Adjoint passes the wrapped trace through.
    CHECK(eval_recipe_traced(MeanRecipe::adjoint(MeanRecipe::harmonic()), mu)
              .trace.steps.empty());

    const SolveResult traced = eval_recipe_traced(MeanRecipe::power(0.5), mu);
    CHECK(!traced.trace.steps.empty());
    CHECK(traced.trace.status == SolveStatus::Converged);
    CHECK(thompson_distance(traced.value, power_mean(0.5, mu).value) <= 1e-10);
}

TEST_CASE("a bound evaluator behaves like eval_recipe") {
    std::mt19937_64 rng(103);
    const DiscreteMeasure mu = random_measure(2, 3, 0.1, rng);
    const MeasureMean eval = recipe_evaluator(parse_recipe("deform(H, geom(0.5))"));
    CHECK(thompson_distance(eval(mu), power_mean(-0.5, mu).value) <= 1e-9);
}
