/**
 * @file detect.hpp
 * @brief Distance-based anomaly scorers and ranking metrics.
 *
 * The scorers only use the test set itself as context: kNN distance to the
 * k-th nearest other point, or the Mahalanobis form under the test set's own
 * mean and covariance.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "focus/errors.hpp"

namespace focus {

struct Scorer {
    enum class Kind { KnnDistance, Mahalanobis };
    Kind kind = Kind::KnnDistance;
    std::size_t k = 1;

    static Scorer knn(std::size_t k) { return {Kind::KnnDistance, k}; }
    static Scorer mahalanobis() { return {Kind::Mahalanobis, 0}; }

    /// Parses "knn:<k>" or "mahalanobis".
    static Scorer parse(const std::string& text) {
        if (text == "mahalanobis") return mahalanobis();
        if (text.rfind("knn:", 0) == 0) {
            const auto digits = text.substr(4);
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
                throw ConfigError("bad k in scorer spec '" + text + "'");
            const auto k = std::stoul(digits);
            if (k == 0) throw ConfigError("knn requires k >= 1");
            return knn(k);
        }
        throw ConfigError("unknown scorer '" + text + "' (expected knn:<k> or mahalanobis)");
    }

    [[nodiscard]] std::string name() const {
        return kind == Kind::Mahalanobis ? std::string("mahalanobis") : "knn:" + std::to_string(k);
    }
};

struct Metrics {
    double auc = 0.5;
    std::map<std::size_t, double> precision_at;
};

struct ScoreReport {
    Eigen::VectorXd scores;  ///< higher = more anomalous
    Scorer scorer;
    std::optional<Metrics> metrics;
};

inline Eigen::VectorXd knn_scores(const Eigen::Ref<const Eigen::MatrixXd>& test, std::size_t k) {
    const auto n = test.rows();
    if (k == 0) throw ScorerError("knn requires k >= 1");
    if (n < static_cast<Eigen::Index>(k) + 1)
        throw ScorerError("knn:" + std::to_string(k) + " needs at least " + std::to_string(k + 1) + " points, got " +
                          std::to_string(n));
    if (!test.allFinite()) throw ScorerError("test matrix contains NaN or Inf");
    Eigen::VectorXd scores(n);
    std::vector<double> dist(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t slot = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) dist[slot++] = (test.row(i) - test.row(j)).squaredNorm();
        auto kth = dist.begin() + static_cast<std::ptrdiff_t>(k - 1);
        std::nth_element(dist.begin(), kth, dist.end());
        scores[i] = std::sqrt(*kth);
    }
    return scores;
}

inline Eigen::VectorXd mahalanobis_scores(const Eigen::Ref<const Eigen::MatrixXd>& test) {
    const auto n = test.rows();
    const auto d = test.cols();
    if (n < 2) throw ScorerError("mahalanobis needs at least 2 points");
    if (!test.allFinite()) throw ScorerError("test matrix contains NaN or Inf");
    const Eigen::RowVectorXd mu = test.colwise().mean();
    const Eigen::MatrixXd centered = test.rowwise() - mu;
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    const double trace = cov.trace();
    if (!(trace > 0.0)) throw ScorerError("test covariance is zero; all points coincide");
    cov.diagonal().array() += 1e-9 * trace / static_cast<double>(d);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw ScorerError("test covariance is not invertible after ridge");
    const Eigen::MatrixXd half = llt.matrixL().solve(centered.transpose());
    return half.colwise().squaredNorm().transpose();
}

inline ScoreReport score(const Eigen::Ref<const Eigen::MatrixXd>& test, const Scorer& scorer) {
    ScoreReport report;
    report.scorer = scorer;
    report.scores = scorer.kind == Scorer::Kind::Mahalanobis ? mahalanobis_scores(test) : knn_scores(test, scorer.k);
    return report;
}

namespace detail {

inline void check_labels(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    if (scores.size() != labels.size())
        throw MetricError("have " + std::to_string(scores.size()) + " scores but " + std::to_string(labels.size()) +
                          " labels");
    bool pos = false, neg = false;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1.0) pos = true;
        else if (labels[i] == 0.0) neg = true;
        else throw MetricError("labels must be 0 or 1");
    }
    if (!pos || !neg) throw MetricError("labels must contain both classes");
    if (!scores.allFinite()) throw MetricError("scores contain NaN or Inf");
}

}  // namespace detail

/// Mann-Whitney AUC from average ranks; tied pairs count 1/2.
inline double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    detail::check_labels(scores, labels);
    const auto n = static_cast<std::size_t>(scores.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[static_cast<Eigen::Index>(a)] < scores[static_cast<Eigen::Index>(b)];
    });
    double pos_rank_sum = 0.0;
    double n_pos = 0.0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && scores[static_cast<Eigen::Index>(order[end])] == scores[static_cast<Eigen::Index>(order[start])]) ++end;
        const double avg_rank = 0.5 * static_cast<double>(start + 1 + end);  // ranks are 1-based
        for (std::size_t i = start; i < end; ++i)
            if (labels[static_cast<Eigen::Index>(order[i])] == 1.0) {
                pos_rank_sum += avg_rank;
                n_pos += 1.0;
            }
        start = end;
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

/// Fraction of positives among the k highest scores (ties broken by lower index).
inline double precision_at(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels, std::size_t k) {
    detail::check_labels(scores, labels);
    const auto n = static_cast<std::size_t>(scores.size());
    if (k == 0 || k > n) throw MetricError("precision@k needs 1 <= k <= " + std::to_string(n));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[static_cast<Eigen::Index>(a)] > scores[static_cast<Eigen::Index>(b)];
    });
    double hits = 0.0;
    for (std::size_t i = 0; i < k; ++i) hits += labels[static_cast<Eigen::Index>(order[i])];
    return hits / static_cast<double>(k);
}

inline Metrics evaluate(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels,
                        const std::vector<std::size_t>& precision_ks = {}) {
    Metrics m;
    m.auc = auc(scores, labels);
    for (auto k : precision_ks) m.precision_at[k] = precision_at(scores, labels, k);
    return m;
}

}  // namespace focus
