/**
 * @file projection.hpp
 * @brief The complementary feature mapping g*(x) = V^T x.
 *
 * U spans the removed (distractor) eigenvectors; V is an orthonormal basis
 * of the Euclidean orthogonal complement of U, so distances between mapped
 * points equal distances between the inputs with the U components dropped.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "focus/errors.hpp"
#include "focus/geneig.hpp"

namespace focus {

struct FocusModel {
    Eigen::MatrixXd removed_basis;  ///< d x k, orthonormal columns (U)
    Eigen::MatrixXd kept_basis;     ///< d x (d - k), orthonormal columns (V)
    Eigen::VectorXd eigenvalues;    ///< spectrum the model was built from, descending
    double cutoff = 0.999;
    double epsilon = 0.0;
    double zero_tol = 1e-9;
    std::optional<double> ambiguous_remove_above;

    [[nodiscard]] Eigen::Index dim_in() const noexcept { return kept_basis.rows(); }
    [[nodiscard]] Eigen::Index dim_out() const noexcept { return kept_basis.cols(); }
    [[nodiscard]] Eigen::Index removed() const noexcept { return removed_basis.cols(); }

    /// Label of each eigenvalue under this model's thresholds.
    [[nodiscard]] std::vector<DirectionLabel> labels() const {
        std::vector<DirectionLabel> out;
        for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
            auto label = classify(eigenvalues[i], cutoff, zero_tol);
            if (label == DirectionLabel::Ambiguous && ambiguous_remove_above && eigenvalues[i] >= *ambiguous_remove_above)
                label = DirectionLabel::RemoveDistractor;
            out.push_back(label);
        }
        return out;
    }
};

namespace detail {

/// Modified Gram-Schmidt with one re-orthogonalization pass against `basis` and itself.
inline Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& vectors, double dependence_tol = 1e-10) {
    Eigen::MatrixXd q = vectors;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const double original = q.col(j).norm();
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        const double norm = q.col(j).norm();
        if (!(norm > dependence_tol * std::max(original, 1e-300)))
            throw DegenerateModelError("removed directions are numerically dependent");
        q.col(j) /= norm;
    }
    return q;
}

/**
 * Orthonormal basis of the complement of span(u), built from identity
 * columns: repeatedly pick the e_j with the largest residual against the
 * current basis (lowest j on ties), then Gram-Schmidt the chosen e_j in
 * ascending j order. Deterministic for a given u.
 */
inline Eigen::MatrixXd complement_basis(const Eigen::MatrixXd& u) {
    const auto d = u.rows();
    const auto k = u.cols();
    Eigen::MatrixXd residual = Eigen::MatrixXd::Identity(d, d);
    residual.noalias() -= u * u.transpose();
    residual -= u * (u.transpose() * residual);  // second pass
    std::vector<bool> chosen(static_cast<std::size_t>(d), false);
    std::vector<Eigen::Index> picks;
    for (Eigen::Index step = 0; step < d - k; ++step) {
        Eigen::Index best = -1;
        double best_norm = -1.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (chosen[static_cast<std::size_t>(j)]) continue;
            const double nj = residual.col(j).norm();
            if (nj > best_norm * (1.0 + 1e-12)) {
                best = j;
                best_norm = nj;
            }
        }
        chosen[static_cast<std::size_t>(best)] = true;
        picks.push_back(best);
        const Eigen::VectorXd q = residual.col(best) / best_norm;
        residual -= q * (q.transpose() * residual);
    }
    std::sort(picks.begin(), picks.end());

    Eigen::MatrixXd v(d, d - k);
    for (Eigen::Index c = 0; c < d - k; ++c) {
        Eigen::VectorXd x = Eigen::VectorXd::Unit(d, picks[static_cast<std::size_t>(c)]);
        for (int pass = 0; pass < 2; ++pass) {
            x -= u * (u.transpose() * x);
            x -= v.leftCols(c) * (v.leftCols(c).transpose() * x);
        }
        v.col(c) = x.normalized();
    }
    return v;
}

}  // namespace detail

/**
 * Builds g* from a partitioned spectrum. Directions labelled RemoveDistractor
 * are removed; if `ambiguous_remove_above` is set, Ambiguous directions with
 * eigenvalue at or above it are removed too.
 */
inline FocusModel build_mapping(const FocusSpectrum& spectrum, const SpectrumPartition& part,
                                std::optional<double> ambiguous_remove_above = std::nullopt) {
    const auto d = spectrum.size();
    if (static_cast<Eigen::Index>(part.labels.size()) != d)
        throw DimensionError("partition has " + std::to_string(part.labels.size()) + " labels for " +
                             std::to_string(d) + " eigenpairs");
    FocusModel model;
    model.eigenvalues = spectrum.eigenvalues;
    model.cutoff = part.cutoff;
    model.zero_tol = part.zero_tol;
    model.epsilon = spectrum.epsilon;
    model.ambiguous_remove_above = ambiguous_remove_above;

    std::vector<Eigen::Index> removed;
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto label = part.labels[static_cast<std::size_t>(i)];
        const bool extra = label == DirectionLabel::Ambiguous && ambiguous_remove_above &&
                           spectrum.eigenvalues[i] >= *ambiguous_remove_above;
        if (label == DirectionLabel::RemoveDistractor || extra) removed.push_back(i);
    }
    if (static_cast<Eigen::Index>(removed.size()) == d)
        throw DegenerateModelError("every direction is marked for removal; nothing would remain");

    Eigen::MatrixXd w(d, static_cast<Eigen::Index>(removed.size()));
    for (std::size_t c = 0; c < removed.size(); ++c) w.col(static_cast<Eigen::Index>(c)) = spectrum.eigenvectors.col(removed[c]);
    model.removed_basis = detail::orthonormalize_columns(w);
    model.kept_basis = detail::complement_basis(model.removed_basis);
    return model;
}

/// Maps each row x to V^T x.
inline Eigen::MatrixXd apply(const FocusModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points) {
    if (points.rows() == 0) return Eigen::MatrixXd(0, model.dim_out());
    if (points.cols() != model.dim_in())
        throw DimensionError("input has " + std::to_string(points.cols()) + " columns, model expects " +
                             std::to_string(model.dim_in()));
    if (!points.allFinite()) throw NumericInputError("input contains NaN or Inf");
    return points * model.kept_basis;
}

/// Maps each transformed row z back to V z in the original space.
inline Eigen::MatrixXd backproject(const FocusModel& model, const Eigen::Ref<const Eigen::MatrixXd>& transformed) {
    if (transformed.rows() == 0) return Eigen::MatrixXd(0, model.dim_in());
    if (transformed.cols() != model.dim_out())
        throw DimensionError("transformed input has " + std::to_string(transformed.cols()) + " columns, model outputs " +
                             std::to_string(model.dim_out()));
    return transformed * model.kept_basis.transpose();
}

}  // namespace focus
