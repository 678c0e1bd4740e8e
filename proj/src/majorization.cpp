// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace opmeans {

namespace {

std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<double>());
    return v;
}

std::vector<double> prefix_sums(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::partial_sum(v.begin(), v.end(), out.begin());
    return out;
}

} // namespace

MajorizationVerdict majorize(const std::vector<double>& a, const std::vector<double>& b,
                             MajorizationKind kind, double slack_scale) {
    if (a.size() != b.size()) {
        throw LengthMismatch("majorize: vectors have lengths " + std::to_string(a.size()) +
                             " and " + std::to_string(b.size()));
    }
    if (a.empty()) throw EmptyInput("majorize: empty vectors");

    std::vector<double> lhs = sorted_desc(a);
    std::vector<double> rhs = sorted_desc(b);
    if (kind == MajorizationKind::Log) {
        for (double x : lhs)
            if (!(x > 0.0)) throw DomainError("majorize: log kind needs positive entries");
        for (double x : rhs)
            if (!(x > 0.0)) throw DomainError("majorize: log kind needs positive entries");
        for (double& x : lhs) x = std::log(x);
        for (double& x : rhs) x = std::log(x);
    }
    if (kind == MajorizationKind::Super) {
        // Supermajorization compares sums of the k smallest entries.
        std::reverse(lhs.begin(), lhs.end());
        std::reverse(rhs.begin(), rhs.end());
    }

    MajorizationVerdict verdict;
    verdict.kind = kind;
    verdict.lhs_partial = prefix_sums(lhs);
    verdict.rhs_partial = prefix_sums(rhs);

    double scale = 1.0;
    for (double x : lhs) scale = std::max(scale, std::abs(x));
    for (double x : rhs) scale = std::max(scale, std::abs(x));
    const double slack = slack_scale * scale * static_cast<double>(lhs.size());

    const std::size_t n = lhs.size();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        // Weak/Strong/Log: lhs partial <= rhs partial. Super: lhs partial
        // of smallest entries >= rhs partial.
        const double margin = kind == MajorizationKind::Super
                                  ? verdict.lhs_partial[k] - verdict.rhs_partial[k]
                                  : verdict.rhs_partial[k] - verdict.lhs_partial[k];
        worst = std::min(worst, margin);
    }
    bool pass = worst >= -slack;
    if (kind == MajorizationKind::Strong || kind == MajorizationKind::Log) {
        const double total_gap = std::abs(verdict.lhs_partial[n - 1] - verdict.rhs_partial[n - 1]);
        pass = pass && total_gap <= slack;
        worst = std::min(worst, slack - total_gap);
    }
    verdict.pass = pass;
    verdict.worst_margin = worst;
    return verdict;
}

std::vector<double> eigenvalue_vector(const HpdMatrix& a) {
    const auto& values = a.eigenvalues();
    return {values.data(), values.data() + values.size()};
}

HpdMatrix parallel_sum(const HpdMatrix& a, const HpdMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("parallel_sum: dimension mismatch");
    Eigen::MatrixXd sum = matrix_inv(a).mat() + matrix_inv(b).mat();
    sum = ((sum + sum.transpose()) / 2.0).eval();
    return matrix_inv(HpdMatrix(sum, a.options()));
}

std::vector<double> parallel_sum(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw LengthMismatch("parallel_sum: length mismatch");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = 1.0 / (1.0 / a[i] + 1.0 / b[i]);
    return out;
}

MonotoneNorm operator_norm() {
    return {"operator", [](const HpdMatrix& a) { return sym_operator_norm(a.mat(), a.options()); }};
}

MonotoneNorm trace_norm() {
    return {"trace", [](const HpdMatrix& a) {
                double total = 0.0;
                for (Eigen::Index i = 0; i < a.dim(); ++i)
                    total += std::abs(a.eigenvalues()[i]);
                return total;
            }};
}

MonotoneNorm ky_fan_norm(int k) {
    if (k < 1) throw ParamOutOfRange("ky_fan_norm: k must be positive");
    return {"kyfan(" + std::to_string(k) + ")", [k](const HpdMatrix& a) {
                const auto& values = a.eigenvalues(); // descending
                double total = 0.0;
                for (Eigen::Index i = 0; i < std::min<Eigen::Index>(k, a.dim()); ++i)
                    total += std::abs(values[i]);
                return total;
            }};
}

MonotoneNorm numerical_radius() {
    return {"numerical-radius",
            [](const HpdMatrix& a) { return sym_operator_norm(a.mat(), a.options()); }};
}

MonotoneNorm operator_plus_trace_norm() {
    return {"operator+|trace|", [](const HpdMatrix& a) {
                return sym_operator_norm(a.mat(), a.options()) + std::abs(a.trace());
            }};
}

std::vector<MonotoneNorm> builtin_monotone_norms(Eigen::Index dim) {
    std::vector<MonotoneNorm> out;
    out.push_back(operator_norm());
    out.push_back(trace_norm());
    out.push_back(ky_fan_norm(static_cast<int>(std::max<Eigen::Index>(1, (dim + 1) / 2))));
    out.push_back(numerical_radius());
    out.push_back(operator_plus_trace_norm());
    return out;
}

PositiveMap compression_map(const std::vector<Eigen::Index>& coords, Eigen::Index in_dim) {
    if (coords.empty()) throw EmptyInput("compression_map: no coordinates");
    for (Eigen::Index c : coords) {
        if (c < 0 || c >= in_dim) throw ParamOutOfRange("compression_map: coordinate out of range");
    }
    const auto out_dim = static_cast<Eigen::Index>(coords.size());
    std::string name = "compression[";
    for (std::size_t i = 0; i < coords.size(); ++i)
        name += (i ? "," : "") + std::to_string(coords[i]);
    name += "]";
    return {std::move(name), out_dim, [coords, out_dim](const HpdMatrix& a) {
                Eigen::MatrixXd sub(out_dim, out_dim);
                for (Eigen::Index i = 0; i < out_dim; ++i)
                    for (Eigen::Index j = 0; j < out_dim; ++j)
                        sub(i, j) = a(coords[static_cast<std::size_t>(i)],
                                      coords[static_cast<std::size_t>(j)]);
                return HpdMatrix(sub, a.options());
            }};
}

PositiveMap pinching_map(const std::vector<std::vector<Eigen::Index>>& blocks,
                         Eigen::Index in_dim) {
    if (blocks.empty()) throw EmptyInput("pinching_map: no blocks");
    std::vector<bool> seen(static_cast<std::size_t>(in_dim), false);
    for (const auto& block : blocks) {
        for (Eigen::Index c : block) {
            if (c < 0 || c >= in_dim || seen[static_cast<std::size_t>(c)]) {
                throw ParamOutOfRange("pinching_map: blocks must partition the coordinates");
            }
            seen[static_cast<std::size_t>(c)] = true;
        }
    }
    for (bool s : seen)
        if (!s) throw ParamOutOfRange("pinching_map: blocks must cover all coordinates");
    return {"pinching(" + std::to_string(blocks.size()) + " blocks)", in_dim,
            [blocks, in_dim](const HpdMatrix& a) {
                Eigen::MatrixXd out = Eigen::MatrixXd::Zero(in_dim, in_dim);
                for (const auto& block : blocks)
                    for (Eigen::Index i : block)
                        for (Eigen::Index j : block) out(i, j) = a(i, j);
                return HpdMatrix(out, a.options());
            }};
}

PositiveMap normalized_congruence_map(const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols()) throw DimensionMismatch("normalized_congruence_map: not square");
    Eigen::MatrixXd gram = s * s.transpose();
    gram = ((gram + gram.transpose()) / 2.0).eval();
    const Eigen::MatrixXd c = matrix_power(HpdMatrix(gram), -0.5).mat();
    return {"congruence-normalized", s.rows(), [s, c](const HpdMatrix& a) {
                Eigen::MatrixXd out = c * s * a.mat() * s.transpose() * c;
                out = ((out + out.transpose()) / 2.0).eval();
                return HpdMatrix(out, a.options());
            }};
}

PositiveMap convex_conjugation_map(const std::vector<double>& coeffs,
                                   const std::vector<Eigen::MatrixXd>& transforms) {
    if (coeffs.size() != transforms.size() || coeffs.empty()) {
        throw LengthMismatch("convex_conjugation_map: coefficient/transform mismatch");
    }
    const Eigen::Index dim = transforms.front().rows();
    for (const auto& t : transforms) {
        if (t.rows() != dim || t.cols() != dim) {
            throw DimensionMismatch("convex_conjugation_map: transforms must share dimensions");
        }
    }
    for (double t : coeffs)
        if (!(t > 0.0)) throw ParamOutOfRange("convex_conjugation_map: coefficients must be > 0");
    return {"convex-conjugations(" + std::to_string(coeffs.size()) + ")", dim,
            [coeffs, transforms, dim](const HpdMatrix& a) {
                Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
                for (std::size_t k = 0; k < coeffs.size(); ++k)
                    out += coeffs[k] * transforms[k] * a.mat() * transforms[k].transpose();
                out = ((out + out.transpose()) / 2.0).eval();
                return HpdMatrix(out, a.options());
            }};
}

} // namespace opmeans
