// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opmeans/hpd.hpp"

namespace opmeans {

/// A two-variable operator mean, represented by its scalar function f on
/// (0, infinity) with f(1) = 1:
///
///     A sigma B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}.
///
/// Operator monotonicity of f cannot be verified numerically; construction
/// enforces the machine-checkable proxies (normalization f(1)=1, positivity
/// and monotonicity on a log-spaced grid, weight alpha = f'(1) in [0,1]).
/// The shipped builtins are certified analytically; anything user-supplied
/// is certified only up to the proxies.
class RepresentingMean {
  public:
    /// f == 1: A sigma B = A.
    static RepresentingMean left();
    /// f(x) = x: A sigma B = B.
    static RepresentingMean right();
    /// Weighted arithmetic mean, f(x) = 1 - t + t x.
    static RepresentingMean arithmetic(double t);
    /// Weighted harmonic mean, f(x) = (1 - t + t/x)^{-1}.
    static RepresentingMean harmonic(double t);
    /// Weighted geometric mean, f(x) = x^t.
    static RepresentingMean geometric(double t);
    /// User-supplied representing function; alpha = f'(1) by central
    /// difference (h = 1e-6) unless given analytically.
    static RepresentingMean custom(std::string name, std::function<double(double)> f,
                                   std::optional<double> alpha = std::nullopt);
    /// Parses a symbolic expression in x over {+,-,*,/,pow,log,exp,const,x}
    /// and certifies it by the grid proxies.
    static RepresentingMean from_expression(std::string name, std::string_view expr);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] double f(double x) const { return f_(x); }
    /// alpha = f'(1), the weight of the mean (0 for the left-trivial mean,
    /// 1 for the right-trivial one).
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] bool is_left_trivial() const { return left_trivial_; }

    /// Adjoint mean: f*(x) = 1/f(1/x); satisfies
    /// A sigma* B = (A^{-1} sigma B^{-1})^{-1}.
    [[nodiscard]] RepresentingMean adjoint() const;
    /// Transpose mean: x f(1/x); swaps the two arguments.
    [[nodiscard]] RepresentingMean transposed() const;
    /// Power modification: f(x^r) for r in (0, 1]; its weight is r * alpha.
    [[nodiscard]] RepresentingMean power_modified(double r) const;

    /// A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}.
    [[nodiscard]] HpdMatrix apply(const HpdMatrix& a, const HpdMatrix& b) const;

  private:
    RepresentingMean(std::string name, std::function<double(double)> f, double alpha,
                     bool validate_grid);

    std::string name_;
    std::function<double(double)> f_;
    double alpha_;
    bool left_trivial_ = false;
};

/// A point at which a classification inequality failed, with both sides.
struct ClassifyWitness {
    double x;
    double second; // the exponent r (pmi/pmd) or the partner point y (gcv/gcc)
    double lhs;
    double rhs;
};

/// Numeric classification of a representing function on a grid:
///   pmi: f(x^r) >= f(x)^r for r >= 1   (power monotone increasing)
///   pmd: f(x^r) <= f(x)^r for r >= 1   (power monotone decreasing)
///   gcv: f(sqrt(xy)) <= sqrt(f(x) f(y))  (geometric convexity)
///   gcc: f(sqrt(xy)) >= sqrt(f(x) f(y))  (geometric concavity)
struct MeanClassification {
    bool pmi = true;
    bool pmd = true;
    bool gcv = true;
    bool gcc = true;
    std::optional<ClassifyWitness> pmi_witness;
    std::optional<ClassifyWitness> pmd_witness;
    std::optional<ClassifyWitness> gcv_witness;
    std::optional<ClassifyWitness> gcc_witness;
};

/// Default classification grid: 41 log-spaced points in [1e-4, 1e4].
std::vector<double> classify_default_grid();
/// Default exponents for the pmi/pmd tests.
std::vector<double> classify_default_exponents();

/// Evaluates the four classification flags on the given grids with a
/// relative slack (default 1e-10); each false flag carries a witness.
MeanClassification classify(const RepresentingMean& sigma,
                            const std::vector<double>& grid = classify_default_grid(),
                            const std::vector<double>& exponents = classify_default_exponents(),
                            double rel_slack = 1e-10);

/// Parses the mean-spec grammar:
///   arith(t) | harm(t) | geom(t) | left | right
///   | adjoint(<spec>) | transpose(<spec>) | pow(<spec>, r)
RepresentingMean parse_mean_spec(std::string_view spec);

/// Parses a scalar expression in the single variable x over
/// {+, -, *, /, ^, pow, log, exp, numeric constants, x}.
std::function<double(double)> parse_scalar_expression(std::string_view expr);

/// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

} // namespace opmeans
