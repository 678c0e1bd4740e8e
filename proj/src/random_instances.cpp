// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/random_instances.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/LU>

namespace opmeans {

std::uint64_t trial_seed(std::uint64_t suite_seed, std::string_view property, int trial) {
    // FNV-1a over the property name, then splitmix64 finalization mixing in
    // the trial index.
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : property) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 1099511628211ULL;
    }
    std::uint64_t z = suite_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(trial) + 1);
    z ^= h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Fix signs by the R diagonal so the distribution is symmetric.
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

HpdMatrix random_hpd(Eigen::Index n, double eps, std::mt19937_64& rng) {
    if (!(eps > 0.0 && eps < 1.0)) throw ParamOutOfRange("random_hpd: eps must lie in (0, 1)");
    std::uniform_real_distribution<double> unif(std::log(eps), -std::log(eps));
    Eigen::VectorXd lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) lambda(i) = std::exp(unif(rng));
    const Eigen::MatrixXd q = random_orthogonal(n, rng);
    Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
    a = ((a + a.transpose()) / 2.0).eval();
    return HpdMatrix(a);
}

Eigen::MatrixXd random_invertible(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        Eigen::MatrixXd g(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
        if (std::abs(g.determinant()) > 1e-3) return g;
    }
}

DiscreteMeasure random_measure(Eigen::Index dim, int atoms, double eps, std::mt19937_64& rng) {
    if (atoms < 1) throw ParamOutOfRange("random_measure: need at least one atom");
    std::uniform_int_distribution<long long> small(1, 8);
    std::vector<long long> raw(static_cast<std::size_t>(atoms));
    long long total = 0;
    for (auto& a : raw) {
        a = small(rng);
        total += a;
    }
    std::vector<HpdMatrix> support;
    support.reserve(raw.size());
    std::vector<Rational> weights;
    weights.reserve(raw.size());
    for (long long a : raw) {
        support.push_back(random_hpd(dim, eps, rng));
        weights.emplace_back(a, total);
    }
    return DiscreteMeasure(std::move(support), std::move(weights));
}

std::pair<DiscreteMeasure, DiscreteMeasure> random_ordered_pair(Eigen::Index dim, int atoms,
                                                                double eps,
                                                                std::mt19937_64& rng) {
    const DiscreteMeasure mu = random_measure(dim, atoms, eps, rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<HpdMatrix> bumped;
    bumped.reserve(mu.size());
    for (const auto& a : mu.atoms()) {
        Eigen::MatrixXd g(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = gauss(rng);
        Eigen::MatrixXd bump = 0.1 * (g * g.transpose()) / static_cast<double>(dim);
        Eigen::MatrixXd b = a.mat() + ((bump + bump.transpose()) / 2.0);
        b = ((b + b.transpose()) / 2.0).eval();
        bumped.emplace_back(b, a.options());
    }
    return {mu, DiscreteMeasure(std::move(bumped), mu.weights())};
}

} // namespace opmeans
