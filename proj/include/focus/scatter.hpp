/**
 * @file scatter.hpp
 * @brief One-pass sufficient statistics and the weighted scatter estimators.
 *
 * For sets X^1..X^M with prior P_m over sets:
 *
 *   mu_m     = (1/n_m) sum_{x in X^m} x
 *   mu_all   = sum_m P_m mu_m
 *   C_within = sum_m P_m (1/n_m) sum_{x in X^m} (x - mu_m)(x - mu_m)^T
 *   C_all    = sum_m P_m (1/n_m) sum_{x in X^m} (x - mu_all)(x - mu_all)^T
 *   Q        = sum_m P_m mu_m mu_m^T - mu_all mu_all^T
 *
 * and C_all = C_within + Q with rank(Q) <= M - 1. All estimators use
 * population (1/n_m) normalization and are evaluated from moments, so data
 * can be streamed once and shards combined with merge().
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "focus/errors.hpp"
#include "focus/set_collection.hpp"

namespace focus {

/// Prior over training sets.
class WeightingScheme {
public:
    enum class Kind { UniformOverSets, ProportionalToSize, Custom };

    static WeightingScheme uniform() { return WeightingScheme(Kind::UniformOverSets, {}); }
    static WeightingScheme proportional() { return WeightingScheme(Kind::ProportionalToSize, {}); }

    /// Weights must be nonnegative and sum to 1 within 1e-12.
    static WeightingScheme custom(std::vector<double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("custom weights must be finite and nonnegative");
            total += w;
        }
        if (weights.empty() || std::abs(total - 1.0) > 1e-12)
            throw ConfigError("custom weights must sum to 1");
        return WeightingScheme(Kind::Custom, std::move(weights));
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<double>& custom_weights() const noexcept { return weights_; }

    /// Expands to P_m given the per-set counts.
    [[nodiscard]] Eigen::VectorXd expand(const std::vector<std::size_t>& counts) const {
        const auto m = static_cast<Eigen::Index>(counts.size());
        if (m == 0) throw EmptySetError("no sets to weight");
        switch (kind_) {
            case Kind::UniformOverSets:
                return Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
            case Kind::ProportionalToSize: {
                const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
                Eigen::VectorXd p(m);
                for (Eigen::Index i = 0; i < m; ++i) p[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]) / total;
                return p;
            }
            case Kind::Custom:
                if (weights_.size() != counts.size())
                    throw ConfigError("custom weighting has " + std::to_string(weights_.size()) +
                                      " weights for " + std::to_string(counts.size()) + " sets");
                return Eigen::Map<const Eigen::VectorXd>(weights_.data(), m);
        }
        return {};
    }

    [[nodiscard]] std::string name() const {
        switch (kind_) {
            case Kind::UniformOverSets: return "uniform";
            case Kind::ProportionalToSize: return "proportional";
            case Kind::Custom: return "custom";
        }
        return "unknown";
    }

private:
    WeightingScheme(Kind kind, std::vector<double> weights) : kind_(kind), weights_(std::move(weights)) {}

    Kind kind_;
    std::vector<double> weights_;
};

/**
 * Per-set streaming moments.
 *
 * Each set optionally stores its moments about a shift c_m (the first point
 * it saw), i.e. sum(x - c_m) and sum((x - c_m)(x - c_m)^T). This bounds the
 * cancellation in S - n mu mu^T when the data sits far from the origin. The
 * raw-moment accessors undo the shift.
 */
class SufficientStats {
public:
    enum class Shift { None, FirstPoint };

    explicit SufficientStats(Eigen::Index dim, Shift shift = Shift::FirstPoint) : dim_(dim), shift_mode_(shift) {
        if (dim <= 0) throw DimensionError("dimension must be positive");
    }

    static SufficientStats from_sets(const SetCollection& collection, Shift shift = Shift::FirstPoint) {
        collection.validate();
        SufficientStats stats(collection.dim(), shift);
        for (std::size_t m = 0; m < collection.size(); ++m) stats.accumulate_rows(m, collection.sets[m]);
        return stats;
    }

    [[nodiscard]] Eigen::Index dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t num_sets() const noexcept { return sets_.size(); }
    [[nodiscard]] Shift shift_mode() const noexcept { return shift_mode_; }

    /// Adds one point to set `set_id`; set_id == num_sets() opens a new set.
    SufficientStats& accumulate(std::size_t set_id, const Eigen::Ref<const Eigen::VectorXd>& point) {
        if (point.size() != dim_)
            throw DimensionError("point has length " + std::to_string(point.size()) + ", expected " +
                                 std::to_string(dim_));
        auto& s = slot(set_id, point);
        const Eigen::VectorXd y = point - s.shift;
        s.count += 1;
        s.sum += y;
        s.second.selfadjointView<Eigen::Lower>().rankUpdate(y);
        return *this;
    }

    /// Adds every row of `rows` to set `set_id` with one rank-k update.
    SufficientStats& accumulate_rows(std::size_t set_id, const Eigen::Ref<const Eigen::MatrixXd>& rows) {
        if (rows.cols() != dim_)
            throw DimensionError("rows have " + std::to_string(rows.cols()) + " columns, expected " +
                                 std::to_string(dim_));
        if (rows.rows() == 0) {
            if (set_id == sets_.size()) sets_.emplace_back(dim_);
            else if (set_id > sets_.size()) throw ConfigError("set id " + std::to_string(set_id) + " skips ahead");
            return *this;
        }
        auto& s = slot(set_id, rows.row(0).transpose());
        const Eigen::MatrixXd y = rows.rowwise() - s.shift.transpose();
        s.count += static_cast<std::size_t>(rows.rows());
        s.sum += y.colwise().sum().transpose();
        s.second.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
        return *this;
    }

    /**
     * Adds b into this: set i here absorbs set i of b. Sets beyond this
     * object's count are appended. For disjoint set-id spaces, offset the
     * ids before accumulation instead.
     */
    SufficientStats& merge(const SufficientStats& b) {
        if (b.dim_ != dim_) throw DimensionError("cannot merge statistics of different dimension");
        for (std::size_t i = 0; i < b.sets_.size(); ++i) {
            const auto& src = b.sets_[i];
            if (i >= sets_.size()) {
                sets_.push_back(src);
                continue;
            }
            auto& dst = sets_[i];
            if (src.count == 0) continue;
            if (dst.count == 0) {
                dst = src;
                continue;
            }
            // Re-express src moments about dst's shift: y' = y + delta.
            const Eigen::VectorXd delta = src.shift - dst.shift;
            const double n = static_cast<double>(src.count);
            dst.second.selfadjointView<Eigen::Lower>().rankUpdate(src.sum, delta, 1.0);
            dst.second.selfadjointView<Eigen::Lower>().rankUpdate(delta, n);
            dst.second.triangularView<Eigen::Lower>() += src.second;
            dst.sum += src.sum + n * delta;
            dst.count += src.count;
        }
        return *this;
    }

    [[nodiscard]] std::vector<std::size_t> counts() const {
        std::vector<std::size_t> c;
        c.reserve(sets_.size());
        for (const auto& s : sets_) c.push_back(s.count);
        return c;
    }

    [[nodiscard]] std::size_t count(std::size_t m) const { return at(m).count; }

    /// Raw sum of the points in set m.
    [[nodiscard]] Eigen::VectorXd sum(std::size_t m) const {
        const auto& s = at(m);
        return s.sum + static_cast<double>(s.count) * s.shift;
    }

    /// Raw second moment sum x x^T of set m (full symmetric matrix).
    [[nodiscard]] Eigen::MatrixXd second_moment(std::size_t m) const {
        const auto& s = at(m);
        Eigen::MatrixXd out = s.second.selfadjointView<Eigen::Lower>();
        out += s.sum * s.shift.transpose() + s.shift * s.sum.transpose();
        out += static_cast<double>(s.count) * s.shift * s.shift.transpose();
        return 0.5 * (out + out.transpose());
    }

    [[nodiscard]] Eigen::VectorXd mean(std::size_t m) const {
        const auto& s = require_nonempty(m);
        return s.shift + s.sum / static_cast<double>(s.count);
    }

    /// sum_{x in X^m} (x - c)(x - c)^T evaluated from the shifted moments.
    [[nodiscard]] Eigen::MatrixXd scatter_about(std::size_t m, const Eigen::VectorXd& c) const {
        const auto& s = require_nonempty(m);
        const Eigen::VectorXd delta = s.shift - c;
        Eigen::MatrixXd out = s.second.selfadjointView<Eigen::Lower>();
        out += s.sum * delta.transpose() + delta * s.sum.transpose();
        out += static_cast<double>(s.count) * delta * delta.transpose();
        return out;
    }

    /// sum_{x in X^m} (x - mu_m)(x - mu_m)^T, i.e. S - n mu mu^T (centered moments).
    [[nodiscard]] Eigen::MatrixXd centered_scatter(std::size_t m) const {
        const auto& s = require_nonempty(m);
        const Eigen::VectorXd local_mean = s.sum / static_cast<double>(s.count);
        Eigen::MatrixXd out = s.second.selfadjointView<Eigen::Lower>();
        out.noalias() -= static_cast<double>(s.count) * local_mean * local_mean.transpose();
        return out;
    }

    void require_all_nonempty() const {
        if (sets_.empty()) throw EmptySetError("statistics hold no sets");
        for (std::size_t m = 0; m < sets_.size(); ++m) require_nonempty(m);
    }

private:
    struct SetMoments {
        explicit SetMoments(Eigen::Index d)
            : sum(Eigen::VectorXd::Zero(d)), second(Eigen::MatrixXd::Zero(d, d)), shift(Eigen::VectorXd::Zero(d)) {}
        std::size_t count = 0;
        Eigen::VectorXd sum;
        Eigen::MatrixXd second;  // lower triangle only
        Eigen::VectorXd shift;
    };

    SetMoments& slot(std::size_t set_id, const Eigen::Ref<const Eigen::VectorXd>& first_point) {
        if (set_id > sets_.size()) throw ConfigError("set id " + std::to_string(set_id) + " skips ahead");
        if (set_id == sets_.size()) sets_.emplace_back(dim_);
        auto& s = sets_[set_id];
        if (s.count == 0 && shift_mode_ == Shift::FirstPoint) s.shift = first_point;
        return s;
    }

    const SetMoments& at(std::size_t m) const {
        if (m >= sets_.size()) throw ConfigError("no set with id " + std::to_string(m));
        return sets_[m];
    }

    const SetMoments& require_nonempty(std::size_t m) const {
        const auto& s = at(m);
        if (s.count == 0) throw EmptySetError("set " + std::to_string(m) + " is empty");
        return s;
    }

    Eigen::Index dim_;
    Shift shift_mode_;
    std::vector<SetMoments> sets_;
};

namespace detail {

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

}  // namespace detail

struct SetMeans {
    std::vector<Eigen::VectorXd> per_set;
    Eigen::VectorXd overall;
};

inline SetMeans set_means(const SufficientStats& stats, const WeightingScheme& weighting) {
    stats.require_all_nonempty();
    const Eigen::VectorXd p = weighting.expand(stats.counts());
    SetMeans out;
    out.overall = Eigen::VectorXd::Zero(stats.dim());
    for (std::size_t m = 0; m < stats.num_sets(); ++m) {
        out.per_set.push_back(stats.mean(m));
        out.overall += p[static_cast<Eigen::Index>(m)] * out.per_set.back();
    }
    return out;
}

inline Eigen::MatrixXd within_scatter(const SufficientStats& stats, const WeightingScheme& weighting) {
    stats.require_all_nonempty();
    const Eigen::VectorXd p = weighting.expand(stats.counts());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(stats.dim(), stats.dim());
    for (std::size_t m = 0; m < stats.num_sets(); ++m)
        c += (p[static_cast<Eigen::Index>(m)] / static_cast<double>(stats.count(m))) * stats.centered_scatter(m);
    return detail::symmetrized(c);
}

inline Eigen::MatrixXd all_scatter(const SufficientStats& stats, const WeightingScheme& weighting) {
    const auto means = set_means(stats, weighting);
    const Eigen::VectorXd p = weighting.expand(stats.counts());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(stats.dim(), stats.dim());
    for (std::size_t m = 0; m < stats.num_sets(); ++m)
        c += (p[static_cast<Eigen::Index>(m)] / static_cast<double>(stats.count(m))) *
             stats.scatter_about(m, means.overall);
    return detail::symmetrized(c);
}

/// Between-set spread, evaluated as sum_m P_m (mu_m - mu_all)(mu_m - mu_all)^T.
inline Eigen::MatrixXd q_matrix(const SufficientStats& stats, const WeightingScheme& weighting) {
    const auto means = set_means(stats, weighting);
    const Eigen::VectorXd p = weighting.expand(stats.counts());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(stats.dim(), stats.dim());
    for (std::size_t m = 0; m < stats.num_sets(); ++m) {
        const Eigen::VectorXd diff = means.per_set[m] - means.overall;
        q.selfadjointView<Eigen::Lower>().rankUpdate(diff, p[static_cast<Eigen::Index>(m)]);
    }
    Eigen::MatrixXd full = q.selfadjointView<Eigen::Lower>();
    return full;
}

/// Immutable bundle of every scatter quantity under one weighting.
struct ScatterSummary {
    Eigen::MatrixXd c_within;
    Eigen::MatrixXd c_all;
    Eigen::MatrixXd q;
    std::vector<Eigen::VectorXd> mu_m;
    Eigen::VectorXd mu_all;
    WeightingScheme weighting;

    /// ||C_all - C_within - Q||_F
    [[nodiscard]] double identity_residual() const { return (c_all - c_within - q).norm(); }
};

inline ScatterSummary summarize(const SufficientStats& stats, const WeightingScheme& weighting) {
    auto means = set_means(stats, weighting);
    return ScatterSummary{within_scatter(stats, weighting),
                          all_scatter(stats, weighting),
                          q_matrix(stats, weighting),
                          std::move(means.per_set),
                          std::move(means.overall),
                          weighting};
}

/**
 * Population scatter of `points` from all pairwise differences:
 * (1/(2 n^2)) sum_{x,y} (x - y)(x - y)^T. O(n^2 d^2); meant as a test
 * oracle for the moment-based estimators.
 */
inline Eigen::MatrixXd pairwise_scatter_oracle(const Eigen::Ref<const Eigen::MatrixXd>& points) {
    const auto n = points.rows();
    const auto d = points.cols();
    if (n == 0) throw EmptySetError("pairwise oracle needs at least one point");
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd diffs(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        diffs = points.rowwise() - points.row(i);
        acc.selfadjointView<Eigen::Lower>().rankUpdate(diffs.transpose());
    }
    Eigen::MatrixXd full = acc.selfadjointView<Eigen::Lower>();
    return full / (2.0 * static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace focus
