// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <vector>

#include "opmeans/hpd.hpp"
#include "opmeans/rational.hpp"
#include "opmeans/scalar_mean.hpp"

namespace opmeans {

/// A finitely supported probability measure on the positive definite
/// matrices of a fixed dimension. Weights are exact rationals and must sum
/// to one exactly; atoms are kept as listed (duplicates are not merged, so
/// pushforwards never change the number of atoms or the weight vector).
class DiscreteMeasure {
  public:
    DiscreteMeasure(std::vector<HpdMatrix> atoms, std::vector<Rational> weights);

    /// Point mass at a single matrix.
    static DiscreteMeasure dirac(const HpdMatrix& a);
    /// Uniform weights 1/n on the given atoms.
    static DiscreteMeasure uniform(std::vector<HpdMatrix> atoms);

    [[nodiscard]] Eigen::Index dim() const { return atoms_.front().dim(); }
    [[nodiscard]] std::size_t size() const { return atoms_.size(); }
    [[nodiscard]] const HpdMatrix& atom(std::size_t i) const { return atoms_.at(i); }
    [[nodiscard]] const std::vector<HpdMatrix>& atoms() const { return atoms_; }
    [[nodiscard]] const Rational& weight(std::size_t i) const { return weights_.at(i); }
    [[nodiscard]] const std::vector<Rational>& weights() const { return weights_; }
    [[nodiscard]] double weight_double(std::size_t i) const { return weights_.at(i).to_double(); }

  private:
    std::vector<HpdMatrix> atoms_;
    std::vector<Rational> weights_;
};

/// Pushforward under A -> a A for a scalar a > 0.
DiscreteMeasure pf_scale(const DiscreteMeasure& mu, double a);
/// Pushforward under the congruence A -> S A S^T for invertible S.
DiscreteMeasure pf_congruence(const DiscreteMeasure& mu, const Eigen::MatrixXd& s);
/// Pushforward under A -> A^{-1}.
DiscreteMeasure pf_inverse(const DiscreteMeasure& mu);
/// Pushforward under A -> A^r.
DiscreteMeasure pf_power(const DiscreteMeasure& mu, double r);
/// Pushforward under A -> X sigma A (the deformation map at base point X).
DiscreteMeasure pf_sigma_left(const DiscreteMeasure& mu, const HpdMatrix& x,
                              const RepresentingMean& sigma);
/// Pushforward under A -> diag(lambda_1(A), ..., lambda_N(A)) (descending).
DiscreteMeasure pf_eigenvalues(const DiscreteMeasure& mu);
/// Pushforward under A -> (det A)^{1/N} as a 1x1 measure.
DiscreteMeasure pf_det_root(const DiscreteMeasure& mu);
/// Pushforward under A -> norm(A) as a 1x1 measure; norm must be positive
/// on positive definite matrices.
DiscreteMeasure pf_norm(const DiscreteMeasure& mu,
                        const std::function<double(const HpdMatrix&)>& norm);
/// Generic pushforward; fn must preserve positive definiteness.
DiscreteMeasure pf_map(const DiscreteMeasure& mu,
                       const std::function<HpdMatrix(const HpdMatrix&)>& fn);
/// Atomwise combination of two measures that carry identical weights.
DiscreteMeasure pf_zip(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const std::function<HpdMatrix(const HpdMatrix&, const HpdMatrix&)>& fn);
/// Product-coupled pushforward under (A, B) -> A (+) B (block diagonal);
/// the result has all pairs of atoms with product weights.
DiscreteMeasure direct_sum(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
/// Convex mixture lam * mu + (1 - lam) * nu by concatenating supports.
DiscreteMeasure mixture(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const Rational& lam);

/// Sum of w_i * fn(A_i); fn must return a symmetric matrix.
Eigen::MatrixXd integrate_sym(const DiscreteMeasure& mu,
                              const std::function<Eigen::MatrixXd(const HpdMatrix&)>& fn);
/// Sum of w_i * fn(A_i) for scalar integrands.
double integrate(const DiscreteMeasure& mu, const std::function<double(const HpdMatrix&)>& fn);

/// Largest eps with eps I <= A <= (1/eps) I across the support of mu,
/// capped away from 1.
SigmaEpsilonBound sigma_epsilon_of(const DiscreteMeasure& mu, double eps_cap = 0.999);

} // namespace opmeans
