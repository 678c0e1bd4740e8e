// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <type_traits>
#include <utility>
#include <vector>

#include "opmeans/errors.hpp"

namespace opmeans {

/// Tolerances and limits for the dense symmetric eigensolver and the
/// positive-definiteness contract. All overridable per call site.
struct EigOptions {
    /// Relative symmetry tolerance: |a_ij - a_ji| <= sym_tol * max(1, max|a|).
    double sym_tol = 1e-10;
    /// Smallest admissible eigenvalue of a positive definite matrix.
    double pd_floor = 1e-12;
    /// Relative tolerance for spectral reconstruction / orthogonality checks.
    double eig_tol = 1e-10;
    /// Jacobi stops once the off-diagonal Frobenius norm falls below
    /// jacobi_threshold * ||A||_F.
    double jacobi_threshold = 1e-12;
    /// Hard cap on Jacobi sweeps; exceeding it throws NoConvergence.
    int max_sweeps = 100;
};

/// Eigen-decomposition of a symmetric matrix: values sorted descending,
/// matching orthonormal eigenvectors in the columns of `vectors`.
template <typename Scalar>
struct SpectrumT {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};

using Spectrum = SpectrumT<double>;

namespace detail {

template <typename Scalar>
void check_symmetric(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                     double sym_tol) {
    if (a.rows() != a.cols()) throw NotSymmetric("matrix is not square");
    const Scalar scale = std::max<Scalar>(Scalar(1), a.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > sym_tol * scale)
                throw NotSymmetric("matrix entries are not symmetric within tolerance");
}

} // namespace detail

/// Dense symmetric eigensolver: cyclic Jacobi rotations.
///
/// Unconditionally convergent and highly accurate on the small dimensions
/// this library targets. Accepts any symmetric matrix (not necessarily
/// definite). Throws NotSymmetric on asymmetric input and NoConvergence if
/// the sweep cap is exhausted before the off-diagonal mass falls under
/// jacobi_threshold * ||A||_F.
template <typename Derived>
SpectrumT<typename Derived::Scalar> eig_sym(const Eigen::MatrixBase<Derived>& input,
                                            const EigOptions& opt = {}) {
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Mat a = input;
    detail::check_symmetric<Scalar>(a, opt.sym_tol);
    const Eigen::Index n = a.rows();

    Mat v = Mat::Identity(n, n);
    if (n > 1) {
        const Scalar norm_target = a.norm() * static_cast<Scalar>(opt.jacobi_threshold);
        bool converged = false;
        for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            Scalar off = 0;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
            off = std::sqrt(Scalar(2) * off);
            if (off <= norm_target) {
                converged = true;
                break;
            }
            for (Eigen::Index p = 0; p < n; ++p) {
                for (Eigen::Index q = p + 1; q < n; ++q) {
                    if (a(p, q) == Scalar(0)) continue;
                    const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * a(p, q));
                    const Scalar t = theta >= Scalar(0)
                                         ? Scalar(1) / (theta + std::sqrt(theta * theta + Scalar(1)))
                                         : Scalar(-1) / (-theta + std::sqrt(theta * theta + Scalar(1)));
                    const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
                    const Scalar s = t * c;

                    const Vec colp = a.col(p), colq = a.col(q);
                    a.col(p) = c * colp - s * colq;
                    a.col(q) = s * colp + c * colq;
                    const Vec rowp = a.row(p), rowq = a.row(q);
                    a.row(p) = (c * rowp - s * rowq).transpose();
                    a.row(q) = (s * rowp + c * rowq).transpose();
                    a(p, q) = a(q, p) = Scalar(0);

                    const Vec vp = v.col(p), vq = v.col(q);
                    v.col(p) = c * vp - s * vq;
                    v.col(q) = s * vp + c * vq;
                }
            }
        }
        if (!converged) {
            // The loop above breaks as soon as the target is met; reaching
            // here means max_sweeps full sweeps did not get there.
            Scalar off = 0;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
            if (std::sqrt(Scalar(2) * off) > norm_target)
                throw NoConvergence("eig_sym: Jacobi sweep limit exceeded");
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    SpectrumT<Scalar> out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

/// Immutable symmetric positive definite matrix with a lazily computed,
/// shared spectral decomposition.
///
/// Copies are cheap (shared state) and the spectral cache is race-free:
/// the decomposition is computed at most once per underlying value via
/// std::call_once. Results of functional calculus carry their spectrum
/// from construction, so chains of spectral operations never re-decompose.
template <typename Scalar>
class HpdMatrixT {
  public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// Wraps a symmetric matrix. Symmetry is validated immediately;
    /// positive definiteness is enforced when the spectrum is first needed
    /// (use `checked` to validate everything eagerly).
    template <typename Derived>
    explicit HpdMatrixT(const Eigen::MatrixBase<Derived>& m, const EigOptions& opt = {})
        : d_(std::make_shared<Data>()) {
        d_->m = m;
        d_->opt = opt;
        detail::check_symmetric<Scalar>(d_->m, opt.sym_tol);
    }

    /// Eagerly validated construction: symmetry, eigendecomposition and
    /// the positive-definiteness floor are all checked before returning.
    template <typename Derived>
    static HpdMatrixT checked(const Eigen::MatrixBase<Derived>& m, const EigOptions& opt = {}) {
        HpdMatrixT a(m, opt);
        (void)a.spectrum();
        return a;
    }

    /// Identity matrix of dimension n.
    static HpdMatrixT identity(Eigen::Index n) {
        SpectrumT<Scalar> s;
        s.values = Vec::Ones(n);
        s.vectors = Mat::Identity(n, n);
        return from_spectrum(std::move(s), EigOptions{});
    }

    /// Builds U diag(values) U^T from a precomputed decomposition
    /// (values descending). Enforces the positive-definiteness floor.
    static HpdMatrixT from_spectrum(SpectrumT<Scalar> s, const EigOptions& opt) {
        if (s.values.size() == 0) throw EmptyInput("HpdMatrix: empty spectrum");
        if (!(s.values.minCoeff() > opt.pd_floor))
            throw NotPositiveDefinite("HpdMatrix: eigenvalue at or below pd_floor");
        Mat m = s.vectors * s.values.asDiagonal() * s.vectors.transpose();
        auto d = std::make_shared<Data>();
        d->m = ((m + m.transpose()) / Scalar(2)).eval();
        d->opt = opt;
        d->spectrum = std::move(s);
        d->has_spectrum = true;
        return HpdMatrixT(std::move(d));
    }

    [[nodiscard]] Eigen::Index dim() const { return d_->m.rows(); }
    [[nodiscard]] const Mat& mat() const { return d_->m; }
    [[nodiscard]] Scalar operator()(Eigen::Index i, Eigen::Index j) const { return d_->m(i, j); }
    [[nodiscard]] const EigOptions& options() const { return d_->opt; }

    /// The cached eigendecomposition (descending eigenvalues). Computed on
    /// first use; throws NotPositiveDefinite if any eigenvalue is at or
    /// below pd_floor.
    [[nodiscard]] const SpectrumT<Scalar>& spectrum() const {
        std::call_once(d_->once, [this] {
            if (!d_->has_spectrum) {
                SpectrumT<Scalar> s = eig_sym(d_->m, d_->opt);
                if (!(s.values.minCoeff() > d_->opt.pd_floor))
                    throw NotPositiveDefinite("HpdMatrix: eigenvalue at or below pd_floor");
                d_->spectrum = std::move(s);
                d_->has_spectrum = true;
            }
        });
        return d_->spectrum;
    }

    [[nodiscard]] const Vec& eigenvalues() const { return spectrum().values; }
    [[nodiscard]] const Mat& eigenvectors() const { return spectrum().vectors; }
    [[nodiscard]] Scalar lambda_max() const { return spectrum().values(0); }
    [[nodiscard]] Scalar lambda_min() const { return spectrum().values(dim() - 1); }
    [[nodiscard]] Scalar trace() const { return d_->m.trace(); }

  private:
    struct Data {
        Mat m;
        EigOptions opt;
        mutable std::once_flag once;
        mutable SpectrumT<Scalar> spectrum;
        mutable bool has_spectrum = false;
    };

    explicit HpdMatrixT(std::shared_ptr<Data> d) : d_(std::move(d)) {}

    std::shared_ptr<Data> d_;
};

using HpdMatrix = HpdMatrixT<double>;

/// U f(lambda) U^T as a plain symmetric matrix; f only needs to be finite
/// on the spectrum (the result may be indefinite, e.g. the matrix log).
template <typename Scalar, typename F>
typename HpdMatrixT<Scalar>::Mat fn_calculus_sym(const HpdMatrixT<Scalar>& a, F&& f) {
    const auto& s = a.spectrum();
    typename HpdMatrixT<Scalar>::Vec fv(s.values.size());
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        fv(i) = static_cast<Scalar>(f(s.values(i)));
        if (!std::isfinite(fv(i)))
            throw DomainError("fn_calculus: function not finite at an eigenvalue");
    }
    typename HpdMatrixT<Scalar>::Mat m = s.vectors * fv.asDiagonal() * s.vectors.transpose();
    return ((m + m.transpose()) / Scalar(2)).eval();
}

/// U f(lambda) U^T as an HPD matrix; f must be finite and positive on the
/// spectrum. The result reuses the eigenbasis, so its own spectrum is
/// available without another decomposition.
template <typename Scalar, typename F>
HpdMatrixT<Scalar> fn_calculus(const HpdMatrixT<Scalar>& a, F&& f) {
    const auto& s = a.spectrum();
    const Eigen::Index n = s.values.size();
    SpectrumT<Scalar> out;
    out.values.resize(n);
    out.vectors = s.vectors;
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = static_cast<Scalar>(f(s.values(i)));
        if (!std::isfinite(out.values(i)))
            throw DomainError("fn_calculus: function not finite at an eigenvalue");
    }
    // Re-sort descending: f need not be monotone.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return out.values(i) > out.values(j); });
    SpectrumT<Scalar> sorted;
    sorted.values.resize(n);
    sorted.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        sorted.values(k) = out.values(order[static_cast<std::size_t>(k)]);
        sorted.vectors.col(k) = out.vectors.col(order[static_cast<std::size_t>(k)]);
    }
    return HpdMatrixT<Scalar>::from_spectrum(std::move(sorted), a.options());
}

template <typename Scalar>
HpdMatrixT<Scalar> matrix_power(const HpdMatrixT<Scalar>& a, Scalar r) {
    return fn_calculus(a, [r](Scalar x) { return std::pow(x, r); });
}

template <typename Scalar>
HpdMatrixT<Scalar> matrix_sqrt(const HpdMatrixT<Scalar>& a) {
    return fn_calculus(a, [](Scalar x) { return std::sqrt(x); });
}

template <typename Scalar>
HpdMatrixT<Scalar> matrix_inv(const HpdMatrixT<Scalar>& a) {
    return fn_calculus(a, [](Scalar x) { return Scalar(1) / x; });
}

template <typename Scalar>
typename HpdMatrixT<Scalar>::Mat matrix_log(const HpdMatrixT<Scalar>& a) {
    return fn_calculus_sym(a, [](Scalar x) { return std::log(x); });
}

/// exp(S) of a symmetric (not necessarily definite) matrix; always HPD.
template <typename Derived>
HpdMatrixT<typename Derived::Scalar> matrix_exp(const Eigen::MatrixBase<Derived>& s,
                                                const EigOptions& opt = {}) {
    using Scalar = typename Derived::Scalar;
    SpectrumT<Scalar> es = eig_sym(s, opt);
    for (Eigen::Index i = 0; i < es.values.size(); ++i) es.values(i) = std::exp(es.values(i));
    return HpdMatrixT<Scalar>::from_spectrum(std::move(es), opt);
}

/// Loewner order test: true iff lambda_min(B - A) >= -slack.
template <typename Scalar>
bool loewner_leq(const HpdMatrixT<Scalar>& a, const HpdMatrixT<Scalar>& b, double slack) {
    if (a.dim() != b.dim()) throw DimensionMismatch("loewner_leq: dimension mismatch");
    if (slack < 0) throw ParamOutOfRange("loewner_leq: slack must be >= 0");
    const auto diff = (b.mat() - a.mat()).eval();
    const auto s = eig_sym(diff, a.options());
    return s.values(s.values.size() - 1) >= -static_cast<Scalar>(slack);
}

/// A^{-1/2} B A^{-1/2}, symmetrized. The whitening that turns statements
/// about the pair (A, B) into statements about a single matrix.
template <typename Scalar>
typename HpdMatrixT<Scalar>::Mat whiten(const HpdMatrixT<Scalar>& a, const HpdMatrixT<Scalar>& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("whiten: dimension mismatch");
    const auto isq = matrix_power(a, Scalar(-0.5)).mat();
    typename HpdMatrixT<Scalar>::Mat w = isq * b.mat() * isq;
    return ((w + w.transpose()) / Scalar(2)).eval();
}

/// Thompson (part) metric: max |log eigenvalue| of A^{-1/2} B A^{-1/2}.
/// Equivalently the least r >= 0 with e^{-r} B <= A <= e^r B.
template <typename Scalar>
Scalar thompson_distance(const HpdMatrixT<Scalar>& a, const HpdMatrixT<Scalar>& b) {
    const auto w = whiten(a, b);
    const auto s = eig_sym(w, a.options());
    Scalar dist = 0;
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        if (!(s.values(i) > Scalar(0)))
            throw NotPositiveDefinite("thompson_distance: whitened matrix not positive");
        dist = std::max(dist, std::abs(std::log(s.values(i))));
    }
    return dist;
}

/// Certificate that a family of matrices lies in the order interval
/// [eps I, eps^{-1} I].
struct SigmaEpsilonBound {
    double epsilon; // in (0, 1)
};

/// Tightest epsilon in (0, 1) with eps I <= A <= eps^{-1} I for every
/// input: min over inputs of min(lambda_min, 1/lambda_max), capped at
/// eps_cap for families that would otherwise allow eps >= 1 (e.g. {I}).
template <typename Scalar>
SigmaEpsilonBound sigma_epsilon_of(const std::vector<HpdMatrixT<Scalar>>& mats,
                                   double eps_cap = 0.999) {
    if (mats.empty()) throw EmptyInput("sigma_epsilon_of: empty input");
    double eps = eps_cap;
    for (const auto& a : mats) {
        eps = std::min(eps, static_cast<double>(a.lambda_min()));
        eps = std::min(eps, 1.0 / static_cast<double>(a.lambda_max()));
    }
    if (!(eps > 0)) throw NotPositiveDefinite("sigma_epsilon_of: non-positive bound");
    return SigmaEpsilonBound{eps};
}

/// Operator norm (largest eigenvalue in absolute value) of a symmetric matrix.
template <typename Derived>
typename Derived::Scalar sym_operator_norm(const Eigen::MatrixBase<Derived>& m,
                                           const EigOptions& opt = {}) {
    const auto s = eig_sym(m, opt);
    using Scalar = typename Derived::Scalar;
    Scalar norm = 0;
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        norm = std::max(norm, std::abs(s.values(i)));
    return norm;
}

} // namespace opmeans
