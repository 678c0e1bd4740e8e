// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/measure.hpp"

#include <cmath>

#include <Eigen/LU>

#include "opmeans/errors.hpp"

namespace opmeans {

DiscreteMeasure::DiscreteMeasure(std::vector<HpdMatrix> atoms, std::vector<Rational> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty()) throw EmptyInput("DiscreteMeasure: no atoms");
    if (atoms_.size() != weights_.size()) {
        throw LengthMismatch("DiscreteMeasure: " + std::to_string(atoms_.size()) + " atoms vs " +
                             std::to_string(weights_.size()) + " weights");
    }
    const Eigen::Index n = atoms_.front().dim();
    Rational total(0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].dim() != n) {
            throw DimensionMismatch("DiscreteMeasure: atom " + std::to_string(i) +
                                    " has dimension " + std::to_string(atoms_[i].dim()) +
                                    ", expected " + std::to_string(n));
        }
        if (!(weights_[i] > Rational(0))) {
            throw ParamOutOfRange("DiscreteMeasure: weight " + std::to_string(i) + " is " +
                                  weights_[i].str() + "; weights must be positive");
        }
        total = total + weights_[i];
    }
    if (total != Rational(1)) {
        throw ParamOutOfRange("DiscreteMeasure: weights sum to " + total.str() +
                              ", expected exactly 1");
    }
}

DiscreteMeasure DiscreteMeasure::dirac(const HpdMatrix& a) {
    return DiscreteMeasure({a}, {Rational(1)});
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<HpdMatrix> atoms) {
    if (atoms.empty()) throw EmptyInput("DiscreteMeasure::uniform: no atoms");
    const auto n = static_cast<long long>(atoms.size());
    std::vector<Rational> w(atoms.size(), Rational(1, n));
    return DiscreteMeasure(std::move(atoms), std::move(w));
}

DiscreteMeasure pf_map(const DiscreteMeasure& mu,
                       const std::function<HpdMatrix(const HpdMatrix&)>& fn) {
    std::vector<HpdMatrix> atoms;
    atoms.reserve(mu.size());
    for (const auto& a : mu.atoms()) atoms.push_back(fn(a));
    return DiscreteMeasure(std::move(atoms), mu.weights());
}

DiscreteMeasure pf_scale(const DiscreteMeasure& mu, double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw ParamOutOfRange("pf_scale: factor must be positive and finite, got " +
                              format_double(a));
    }
    return pf_map(mu, [a](const HpdMatrix& m) {
        // Scaling multiplies the spectrum; reuse the eigenbasis.
        return fn_calculus(m, [a](double x) { return a * x; });
    });
}

DiscreteMeasure pf_congruence(const DiscreteMeasure& mu, const Eigen::MatrixXd& s) {
    if (s.rows() != mu.dim() || s.cols() != mu.dim()) {
        throw DimensionMismatch("pf_congruence: transform is " + std::to_string(s.rows()) + "x" +
                                std::to_string(s.cols()) + ", atoms have dimension " +
                                std::to_string(mu.dim()));
    }
    if (std::abs(s.determinant()) < 1e-300) {
        throw ParamOutOfRange("pf_congruence: transform is singular");
    }
    return pf_map(mu, [&s](const HpdMatrix& m) {
        Eigen::MatrixXd out = s * m.mat() * s.transpose();
        out = ((out + out.transpose()) / 2.0).eval();
        return HpdMatrix(out, m.options());
    });
}

DiscreteMeasure pf_inverse(const DiscreteMeasure& mu) {
    return pf_map(mu, [](const HpdMatrix& m) { return matrix_inv(m); });
}

DiscreteMeasure pf_power(const DiscreteMeasure& mu, double r) {
    if (!std::isfinite(r) || r == 0.0) {
        throw ParamOutOfRange("pf_power: exponent must be finite and nonzero, got " +
                              format_double(r));
    }
    return pf_map(mu, [r](const HpdMatrix& m) { return matrix_power(m, r); });
}

DiscreteMeasure pf_sigma_left(const DiscreteMeasure& mu, const HpdMatrix& x,
                              const RepresentingMean& sigma) {
    if (x.dim() != mu.dim()) {
        throw DimensionMismatch("pf_sigma_left: base point has dimension " +
                                std::to_string(x.dim()) + ", atoms have " +
                                std::to_string(mu.dim()));
    }
    return pf_map(mu, [&](const HpdMatrix& a) { return sigma.apply(x, a); });
}

DiscreteMeasure pf_eigenvalues(const DiscreteMeasure& mu) {
    return pf_map(mu, [](const HpdMatrix& m) {
        const auto& sp = m.spectrum();
        Eigen::MatrixXd d = sp.values.asDiagonal();
        return HpdMatrix(d, m.options());
    });
}

DiscreteMeasure pf_det_root(const DiscreteMeasure& mu) {
    const double n = static_cast<double>(mu.dim());
    return pf_map(mu, [n](const HpdMatrix& m) {
        // det A = product of eigenvalues; go through logs for stability.
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < m.dim(); ++i) log_det += std::log(m.eigenvalues()[i]);
        Eigen::MatrixXd out(1, 1);
        out(0, 0) = std::exp(log_det / n);
        return HpdMatrix(out, m.options());
    });
}

DiscreteMeasure pf_norm(const DiscreteMeasure& mu,
                        const std::function<double(const HpdMatrix&)>& norm) {
    return pf_map(mu, [&norm](const HpdMatrix& m) {
        Eigen::MatrixXd out(1, 1);
        out(0, 0) = norm(m);
        return HpdMatrix(out, m.options());
    });
}

DiscreteMeasure pf_zip(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const std::function<HpdMatrix(const HpdMatrix&, const HpdMatrix&)>& fn) {
    if (mu.size() != nu.size()) {
        throw LengthMismatch("pf_zip: supports have sizes " + std::to_string(mu.size()) +
                             " and " + std::to_string(nu.size()));
    }
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.weight(i) != nu.weight(i)) {
            throw ParamOutOfRange("pf_zip: weight " + std::to_string(i) + " differs: " +
                                  mu.weight(i).str() + " vs " + nu.weight(i).str());
        }
    }
    std::vector<HpdMatrix> atoms;
    atoms.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) atoms.push_back(fn(mu.atom(i), nu.atom(i)));
    return DiscreteMeasure(std::move(atoms), mu.weights());
}

DiscreteMeasure direct_sum(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    std::vector<HpdMatrix> atoms;
    std::vector<Rational> weights;
    atoms.reserve(mu.size() * nu.size());
    weights.reserve(mu.size() * nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = 0; j < nu.size(); ++j) {
            Eigen::MatrixXd block = Eigen::MatrixXd::Zero(mu.dim() + nu.dim(), mu.dim() + nu.dim());
            block.topLeftCorner(mu.dim(), mu.dim()) = mu.atom(i).mat();
            block.bottomRightCorner(nu.dim(), nu.dim()) = nu.atom(j).mat();
            atoms.emplace_back(block, mu.atom(i).options());
            weights.push_back(mu.weight(i) * nu.weight(j));
        }
    }
    return DiscreteMeasure(std::move(atoms), std::move(weights));
}

DiscreteMeasure mixture(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const Rational& lam) {
    if (!(lam > Rational(0)) || !(lam < Rational(1))) {
        throw ParamOutOfRange("mixture: coefficient must lie strictly in (0, 1), got " +
                              lam.str());
    }
    if (mu.dim() != nu.dim()) {
        throw DimensionMismatch("mixture: dimensions " + std::to_string(mu.dim()) + " and " +
                                std::to_string(nu.dim()) + " differ");
    }
    std::vector<HpdMatrix> atoms = mu.atoms();
    atoms.insert(atoms.end(), nu.atoms().begin(), nu.atoms().end());
    std::vector<Rational> weights;
    weights.reserve(mu.size() + nu.size());
    const Rational one_minus = Rational(1) - lam;
    for (const auto& w : mu.weights()) weights.push_back(lam * w);
    for (const auto& w : nu.weights()) weights.push_back(one_minus * w);
    return DiscreteMeasure(std::move(atoms), std::move(weights));
}

Eigen::MatrixXd integrate_sym(const DiscreteMeasure& mu,
                              const std::function<Eigen::MatrixXd(const HpdMatrix&)>& fn) {
    Eigen::MatrixXd acc;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        Eigen::MatrixXd term = mu.weight_double(i) * fn(mu.atom(i));
        acc = (i == 0) ? term : Eigen::MatrixXd(acc + term);
    }
    return ((acc + acc.transpose()) / 2.0).eval();
}

double integrate(const DiscreteMeasure& mu, const std::function<double(const HpdMatrix&)>& fn) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weight_double(i) * fn(mu.atom(i));
    return acc;
}

SigmaEpsilonBound sigma_epsilon_of(const DiscreteMeasure& mu, double eps_cap) {
    return sigma_epsilon_of(mu.atoms(), eps_cap);
}

} // namespace opmeans
