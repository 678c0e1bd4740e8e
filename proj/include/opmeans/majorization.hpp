// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "opmeans/hpd.hpp"

namespace opmeans {

/// The four vector orders used by the eigenvalue inequalities:
///   Weak   (prec_w):  sums of the k largest entries dominate;
///   Strong (prec):    weak plus total-sum equality;
///   Log    (prec_log): products of the k largest dominate, total products
///                      equal (positive entries required);
///   Super  (prec^w):  sums of the k smallest entries dominate the other
///                      way (supermajorization).
enum class MajorizationKind { Weak, Strong, Log, Super };

struct MajorizationVerdict {
    MajorizationKind kind;
    /// Partial aggregates of both sides after rearrangement (sums, or sums
    /// of logs for the Log kind).
    std::vector<double> lhs_partial;
    std::vector<double> rhs_partial;
    bool pass = false;
    /// Smallest signed slack across the defining inequalities; negative
    /// means violated by that amount.
    double worst_margin = 0.0;
};

/// Decides a <kind> b with additive slack 1e-9 * scale (scale from the
/// entries; log kind measures slack on the log scale).
MajorizationVerdict majorize(const std::vector<double>& a, const std::vector<double>& b,
                             MajorizationKind kind, double slack_scale = 1e-9);

/// Eigenvalues of an HPD matrix as a descending std::vector.
std::vector<double> eigenvalue_vector(const HpdMatrix& a);

/// Parallel sum A : B = (A^{-1} + B^{-1})^{-1}.
HpdMatrix parallel_sum(const HpdMatrix& a, const HpdMatrix& b);
/// Entrywise parallel sum of two positive vectors.
std::vector<double> parallel_sum(const std::vector<double>& a, const std::vector<double>& b);

/// A unitarily invariant (hence monotone) norm with a display name.
struct MonotoneNorm {
    std::string name;
    std::function<double(const HpdMatrix&)> fn;
};

/// Largest singular value (= largest eigenvalue magnitude here).
MonotoneNorm operator_norm();
/// Sum of singular values (= trace on positive matrices).
MonotoneNorm trace_norm();
/// Sum of the k largest eigenvalues.
MonotoneNorm ky_fan_norm(int k);
/// Numerical radius; coincides with the operator norm for symmetric input.
MonotoneNorm numerical_radius();
/// Operator norm plus |trace| — a monotone norm that is not a Ky Fan norm.
MonotoneNorm operator_plus_trace_norm();

/// The default battery of monotone norms for property runs.
std::vector<MonotoneNorm> builtin_monotone_norms(Eigen::Index dim);

/// A positive linear map with invertible Phi(I), together with its output
/// dimension.
struct PositiveMap {
    std::string name;
    Eigen::Index out_dim;
    std::function<HpdMatrix(const HpdMatrix&)> fn;
};

/// A -> principal submatrix on the given coordinates.
PositiveMap compression_map(const std::vector<Eigen::Index>& coords, Eigen::Index in_dim);
/// A -> sum of P_k A P_k over a coordinate partition (block pinching).
PositiveMap pinching_map(const std::vector<std::vector<Eigen::Index>>& blocks,
                         Eigen::Index in_dim);
/// A -> C S A S^T C with C = (S S^T)^{-1/2}, so the map is unital.
PositiveMap normalized_congruence_map(const Eigen::MatrixXd& s);
/// A -> sum of t_k S_k A S_k^T with positive coefficients.
PositiveMap convex_conjugation_map(const std::vector<double>& coeffs,
                                   const std::vector<Eigen::MatrixXd>& transforms);

} // namespace opmeans
