// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>

#include "opmeans/random_instances.hpp"
#include "opmeans/scalar_mean.hpp"

using namespace opmeans;

TEST_CASE("builtin representing functions take their textbook values") {
    const RepresentingMean arith = RepresentingMean::arithmetic(0.3);
    const RepresentingMean harm = RepresentingMean::harmonic(0.3);
    const RepresentingMean geom = RepresentingMean::geometric(0.3);
    for (double x : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        CHECK(arith.f(x) == doctest::Approx(0.7 + 0.3 * x).epsilon(1e-14));
        CHECK(harm.f(x) == doctest::Approx(1.0 / (0.7 + 0.3 / x)).epsilon(1e-14));
        CHECK(geom.f(x) == doctest::Approx(std::pow(x, 0.3)).epsilon(1e-14));
    }
    // Normalization f(1) = 1 for every builtin.
    for (const auto& s : {RepresentingMean::left(), RepresentingMean::right(), arith, harm, geom}) {
        CHECK(s.f(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("weights alpha = f'(1) are exact for the builtins") {
    CHECK(RepresentingMean::left().alpha() == doctest::Approx(0.0));
    CHECK(RepresentingMean::right().alpha() == doctest::Approx(1.0));
    CHECK(RepresentingMean::arithmetic(0.4).alpha() == doctest::Approx(0.4));
    CHECK(RepresentingMean::harmonic(0.4).alpha() == doctest::Approx(0.4));
    CHECK(RepresentingMean::geometric(0.4).alpha() == doctest::Approx(0.4));
    CHECK(RepresentingMean::left().is_left_trivial());
    CHECK_FALSE(RepresentingMean::geometric(0.4).is_left_trivial());
    // The power modification scales the weight by its exponent.
    CHECK(RepresentingMean::geometric(0.5).power_modified(0.5).alpha() ==
          doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("parameter validation rejects out-of-range weights and exponents") {
    CHECK_THROWS_AS(RepresentingMean::arithmetic(-0.1), ParamOutOfRange);
    CHECK_THROWS_AS(RepresentingMean::arithmetic(1.1), ParamOutOfRange);
    CHECK_THROWS_AS(RepresentingMean::geometric(2.0), ParamOutOfRange);
    CHECK_THROWS_AS(RepresentingMean::geometric(0.5).power_modified(0.0), ParamOutOfRange);
    CHECK_THROWS_AS(RepresentingMean::geometric(0.5).power_modified(1.5), ParamOutOfRange);
}

TEST_CASE("apply reduces to a * f(b/a) for scalars") {
    const HpdMatrix a(Eigen::MatrixXd::Constant(1, 1, 4.0));
    const HpdMatrix b(Eigen::MatrixXd::Constant(1, 1, 9.0));
    const RepresentingMean geom = RepresentingMean::geometric(0.5);
    CHECK(geom.apply(a, b)(0, 0) == doctest::Approx(6.0).epsilon(1e-12));
    const RepresentingMean arith = RepresentingMean::arithmetic(0.25);
    CHECK(arith.apply(a, b)(0, 0) == doctest::Approx(0.75 * 4 + 0.25 * 9).epsilon(1e-12));
}

TEST_CASE("harmonic <= geometric <= arithmetic in the Loewner order") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        const HpdMatrix a = random_hpd(3, 0.1, rng);
        const HpdMatrix b = random_hpd(3, 0.1, rng);
        for (double t : {0.25, 0.5, 0.75}) {
            const HpdMatrix h = RepresentingMean::harmonic(t).apply(a, b);
            const HpdMatrix g = RepresentingMean::geometric(t).apply(a, b);
            const HpdMatrix m = RepresentingMean::arithmetic(t).apply(a, b);
            const double slack = 1e-10 * (1.0 + m.lambda_max());
            CHECK(loewner_leq(h, g, slack));
            CHECK(loewner_leq(g, m, slack));
        }
    }
}

TEST_CASE("adjoint and transpose act as documented on operators") {
    std::mt19937_64 rng(6);
    const HpdMatrix a = random_hpd(2, 0.2, rng);
    const HpdMatrix b = random_hpd(2, 0.2, rng);
    const RepresentingMean sigma = RepresentingMean::harmonic(0.3);

    // A sigma* B = (A^{-1} sigma B^{-1})^{-1}.
    const HpdMatrix lhs = sigma.adjoint().apply(a, b);
    const HpdMatrix rhs = matrix_inv(sigma.apply(matrix_inv(a), matrix_inv(b)));
    CHECK(thompson_distance(lhs, rhs) <= 1e-10);

    // A sigma^t B = B sigma A.
    const HpdMatrix lhs_t = sigma.transposed().apply(a, b);
    const HpdMatrix rhs_t = sigma.apply(b, a);
    CHECK(thompson_distance(lhs_t, rhs_t) <= 1e-10);

    // The geometric family is self-adjoint.
    const RepresentingMean g = RepresentingMean::geometric(0.4);
    for (double x : {0.2, 1.0, 3.0}) CHECK(g.adjoint().f(x) == doctest::Approx(g.f(x)).epsilon(1e-12));
    // Arithmetic and harmonic are adjoints of each other.
    for (double x : {0.2, 1.0, 3.0}) {
        CHECK(RepresentingMean::arithmetic(0.3).adjoint().f(x) ==
              doctest::Approx(RepresentingMean::harmonic(0.3).f(x)).epsilon(1e-12));
    }
}

TEST_CASE("classification separates the builtin families") {
    // Geometric: f(x^r) = f(x)^r exactly, so both power flags hold.
    const MeanClassification g = classify(RepresentingMean::geometric(0.5));
    CHECK(g.pmi);
    CHECK(g.pmd);
    CHECK(g.gcv);
    CHECK(g.gcc);

    // Arithmetic: power-monotone increasing and geometrically convex only.
    const MeanClassification a = classify(RepresentingMean::arithmetic(0.5));
    CHECK(a.pmi);
    CHECK_FALSE(a.pmd);
    CHECK(a.gcv);
    CHECK_FALSE(a.gcc);
    REQUIRE(a.pmd_witness.has_value());
    // The witness must actually violate the claimed inequality.
    CHECK(a.pmd_witness->lhs > a.pmd_witness->rhs);

    // Harmonic: the adjoint dual pattern.
    const MeanClassification h = classify(RepresentingMean::harmonic(0.5));
    CHECK_FALSE(h.pmi);
    CHECK(h.pmd);
    CHECK_FALSE(h.gcv);
    CHECK(h.gcc);
}

TEST_CASE("custom representing functions are certified by the grid proxies") {
    CHECK_THROWS_AS(RepresentingMean::custom("twice", [](double x) { return 2.0 * x; }),
                    InputError); // f(1) != 1
    CHECK_THROWS_AS(RepresentingMean::custom("decreasing", [](double x) { return 2.0 - x; }),
                    InputError); // not monotone on the grid
    const RepresentingMean ok =
        RepresentingMean::custom("sqrt", [](double x) { return std::sqrt(x); });
    CHECK(ok.alpha() == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("mean-spec grammar parses and rejects as documented") {
    const RepresentingMean g = parse_mean_spec("geom(0.25)");
    CHECK(g.f(4.0) == doctest::Approx(std::pow(4.0, 0.25)).epsilon(1e-12));
    const RepresentingMean pm = parse_mean_spec("pow(geom(0.5), 0.5)");
    for (double x : {0.3, 2.0, 7.0}) {
        CHECK(pm.f(x) == doctest::Approx(std::pow(x, 0.25)).epsilon(1e-12));
    }
    CHECK(parse_mean_spec("left").is_left_trivial());
    CHECK(parse_mean_spec("adjoint(arith(0.3))").f(2.0) ==
          doctest::Approx(RepresentingMean::harmonic(0.3).f(2.0)).epsilon(1e-12));
    CHECK(parse_mean_spec("transpose(arith(0.3))").alpha() == doctest::Approx(0.7).epsilon(1e-9));

    CHECK_THROWS_AS(parse_mean_spec("median(0.5)"), ParseError);
    CHECK_THROWS_AS(parse_mean_spec("geom(0.5"), ParseError);
    CHECK_THROWS_AS(parse_mean_spec("geom(x)"), ParseError);
    CHECK_THROWS_AS(parse_mean_spec(""), ParseError);
}

TEST_CASE("expression parser covers the documented operator set") {
    const auto f = parse_scalar_expression("(1 + x) / 2");
    CHECK(f(3.0) == doctest::Approx(2.0).epsilon(1e-14));
    const auto p = parse_scalar_expression("x^0.5");
    CHECK(p(9.0) == doctest::Approx(3.0).epsilon(1e-14));
    const auto e = parse_scalar_expression("exp(0.5 * log(x))");
    CHECK(e(16.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(parse_scalar_expression("x +"), ParseError);
    CHECK_THROWS_AS(parse_scalar_expression("y"), ParseError);

    const RepresentingMean viaExpr = RepresentingMean::from_expression("half", "(1 + x) / 2");
    CHECK(viaExpr.f(5.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(viaExpr.alpha() == doctest::Approx(0.5).epsilon(1e-5));
    // Expressions violating the proxies are rejected at construction.
    CHECK_THROWS_AS(RepresentingMean::from_expression("bad", "2 * x"), InputError);
}

TEST_CASE("format_double round-trips doubles exactly") {
    for (double v : {0.1, 1.0 / 3.0, 2.718281828459045, 1e-17, -4.9406564584124654e-324,
                     123456789.123456789, 0.0}) {
        // strtod instead of stod: stod raises out_of_range on denormals.
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(4.0) == "4");
}
