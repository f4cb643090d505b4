/**
 * @file geneig.hpp
 * @brief Symmetric-definite generalized eigensolver for the pencil
 *        (C_within, C_all + eps I) and the keep/remove partition of its spectrum.
 *
 * Eigenvalues are the stationary values of the ratio
 *
 *   w^T C_within w / w^T (C_all + eps I) w,
 *
 * which lie in [0, 1] because C_all = C_within + Q with Q PSD.
 * A value near 0 marks a direction that never varies inside a set,
 * values strictly inside (0, 1) live in the span of Q, and values
 * near 1 mark pure within-set variation.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "focus/errors.hpp"

namespace focus {

struct FocusSpectrum {
    Eigen::VectorXd eigenvalues;   ///< descending
    Eigen::MatrixXd eigenvectors;  ///< column i pairs with eigenvalues[i]; unit Euclidean norm
    double epsilon = 0.0;

    [[nodiscard]] Eigen::Index size() const noexcept { return eigenvalues.size(); }
};

/// Relative cushion: rel * trace(C_all) / d.
inline double default_epsilon(const Eigen::MatrixXd& c_all, double rel = 1e-6) {
    if (c_all.rows() == 0) return 0.0;
    return rel * c_all.trace() / static_cast<double>(c_all.rows());
}

namespace detail {

inline void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw NumericInputError(std::string(what) + " contains NaN or Inf");
}

/// Lower Cholesky factor of an SPD matrix; reports the first non-positive pivot.
inline Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& b) {
    const auto n = b.rows();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = b(j, j) - l.row(j).head(j).squaredNorm();
        if (!(pivot > 0.0)) throw IndefiniteDenominatorError(static_cast<std::size_t>(j), pivot);
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        if (j + 1 < n) {
            l.col(j).tail(n - j - 1) =
                (b.col(j).tail(n - j - 1) - l.bottomLeftCorner(n - j - 1, j) * l.row(j).head(j).transpose()) / ljj;
        }
    }
    return l;
}

inline Eigen::Index argmax_abs(const Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    return best;
}

}  // namespace detail

/**
 * Solves C_within w = lambda (C_all + eps I) w by reduction to a standard
 * symmetric problem: B = L L^T, M = L^{-1} C_within L^{-T}, M y = lambda y,
 * w = L^{-T} y. Eigenvectors are renormalized to unit Euclidean length, the
 * largest-magnitude component is made positive, and eigenvalues are sorted
 * descending (near-ties ordered by argmax index).
 */
inline FocusSpectrum solve(const Eigen::MatrixXd& c_within, const Eigen::MatrixXd& c_all, double epsilon) {
    if (c_within.rows() != c_within.cols() || c_all.rows() != c_all.cols() || c_within.rows() != c_all.rows())
        throw DimensionError("pencil matrices must be square and of equal size");
    if (c_within.rows() == 0) throw DimensionError("pencil matrices are empty");
    if (!std::isfinite(epsilon)) throw NumericInputError("epsilon is not finite");
    if (epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
    detail::require_finite(c_within, "C_within");
    detail::require_finite(c_all, "C_all");

    const auto d = c_within.rows();
    const Eigen::MatrixXd a = 0.5 * (c_within + c_within.transpose());
    Eigen::MatrixXd b = 0.5 * (c_all + c_all.transpose());
    b.diagonal().array() += epsilon;

    const Eigen::MatrixXd l = detail::cholesky_lower(b);
    const auto lower = l.triangularView<Eigen::Lower>();
    Eigen::MatrixXd reduced = lower.solve(a);
    reduced = lower.solve(reduced.transpose()).transpose();
    reduced = 0.5 * (reduced + reduced.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
    if (eig.info() != Eigen::Success) throw NumericInputError("symmetric eigensolver did not converge");

    Eigen::MatrixXd w = l.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors());
    Eigen::VectorXd lambda = eig.eigenvalues();

    // Round-off can push eigenvalues of the PSD reduced matrix slightly negative.
    const double clamp = 1e-8 * std::max(1.0, std::abs(reduced.trace()));
    for (Eigen::Index i = 0; i < d; ++i)
        if (lambda[i] < 0.0 && lambda[i] >= -clamp) lambda[i] = 0.0;

    std::vector<Eigen::Index> lead(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        auto col = w.col(i);
        col.normalize();
        const auto k = detail::argmax_abs(col);
        if (col[k] < 0.0) col = -col;
        lead[static_cast<std::size_t>(i)] = k;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return lambda[x] > lambda[y]; });
    // Within runs of numerically equal eigenvalues, order by leading component index.
    const double tie_tol = 1e-12;
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start + 1;
        while (end < order.size() &&
               lambda[order[end - 1]] - lambda[order[end]] <= tie_tol * std::max(1.0, std::abs(lambda[order[start]])))
            ++end;
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](Eigen::Index x, Eigen::Index y) { return lead[static_cast<std::size_t>(x)] < lead[static_cast<std::size_t>(y)]; });
        start = end;
    }

    FocusSpectrum out;
    out.epsilon = epsilon;
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        out.eigenvalues[i] = lambda[order[static_cast<std::size_t>(i)]];
        out.eigenvectors.col(i) = w.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

/// Residual max_i ||A w_i - lambda_i B w_i|| for B = C_all + eps I.
inline double max_residual(const FocusSpectrum& s, const Eigen::MatrixXd& c_within, const Eigen::MatrixXd& c_all) {
    Eigen::MatrixXd b = c_all;
    b.diagonal().array() += s.epsilon;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const auto w = s.eigenvectors.col(i);
        worst = std::max(worst, (c_within * w - s.eigenvalues[i] * (b * w)).norm());
    }
    return worst;
}

enum class DirectionLabel { KeepNull, Ambiguous, RemoveDistractor };

inline const char* to_string(DirectionLabel label) {
    switch (label) {
        case DirectionLabel::KeepNull: return "keep-null";
        case DirectionLabel::Ambiguous: return "ambiguous";
        case DirectionLabel::RemoveDistractor: return "remove";
    }
    return "?";
}

struct SpectrumPartition {
    std::vector<DirectionLabel> labels;
    double cutoff = 0.999;
    double zero_tol = 1e-9;

    [[nodiscard]] std::size_t count(DirectionLabel label) const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
    }
};

inline void validate_thresholds(double cutoff, double zero_tol) {
    if (!(cutoff > 0.0 && cutoff <= 1.0)) throw ConfigError("cutoff must lie in (0, 1]");
    if (!(zero_tol >= 0.0 && zero_tol < cutoff)) throw ConfigError("zero_tol must lie in [0, cutoff)");
}

inline DirectionLabel classify(double lambda, double cutoff, double zero_tol) {
    if (lambda <= zero_tol) return DirectionLabel::KeepNull;
    if (lambda < cutoff) return DirectionLabel::Ambiguous;
    return DirectionLabel::RemoveDistractor;
}

inline SpectrumPartition partition(const Eigen::VectorXd& eigenvalues, double cutoff, double zero_tol) {
    validate_thresholds(cutoff, zero_tol);
    SpectrumPartition out;
    out.cutoff = cutoff;
    out.zero_tol = zero_tol;
    out.labels.reserve(static_cast<std::size_t>(eigenvalues.size()));
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) out.labels.push_back(classify(eigenvalues[i], cutoff, zero_tol));
    return out;
}

inline SpectrumPartition partition(const FocusSpectrum& spectrum, double cutoff, double zero_tol) {
    return partition(spectrum.eigenvalues, cutoff, zero_tol);
}

}  // namespace focus
