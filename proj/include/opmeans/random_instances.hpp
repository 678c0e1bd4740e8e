// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

#include "opmeans/measure.hpp"

namespace opmeans {

/// Deterministic per-trial seed derived from a suite seed, a property name
/// and a trial index, so trials are reproducible independently of execution
/// order or thread count.
std::uint64_t trial_seed(std::uint64_t suite_seed, std::string_view property, int trial);

/// Haar-ish random orthogonal matrix (QR of a Gaussian with sign fix).
Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng);

/// Random positive definite matrix Q diag(lambda) Q^T with log-uniform
/// eigenvalues in [eps, 1/eps]. eps in (0, 1).
HpdMatrix random_hpd(Eigen::Index n, double eps, std::mt19937_64& rng);

/// Random invertible matrix (Gaussian, resampled while ill-conditioned).
Eigen::MatrixXd random_invertible(Eigen::Index n, std::mt19937_64& rng);

/// Random measure with the given support size: atoms from random_hpd,
/// weights a_i / sum(a) with small random integers a_i.
DiscreteMeasure random_measure(Eigen::Index dim, int atoms, double eps, std::mt19937_64& rng);

/// A pair mu <= nu certified atomwise: nu's atoms are mu's plus a random
/// positive semidefinite bump (same weights).
std::pair<DiscreteMeasure, DiscreteMeasure> random_ordered_pair(Eigen::Index dim, int atoms,
                                                                double eps,
                                                                std::mt19937_64& rng);

} // namespace opmeans
