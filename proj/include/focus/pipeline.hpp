/**
 * @file pipeline.hpp
 * @brief Training sets -> scatter -> spectrum -> mapping, in one call.
 */

#pragma once

#include <optional>

#include "focus/geneig.hpp"
#include "focus/projection.hpp"
#include "focus/scatter.hpp"

namespace focus {

struct TrainOptions {
    WeightingScheme weighting = WeightingScheme::uniform();
    double epsilon_rel = 1e-6;           ///< eps = epsilon_rel * trace(C_all) / d
    std::optional<double> epsilon_abs;   ///< overrides epsilon_rel when set
    double cutoff = 0.999;
    double zero_tol = 1e-9;
    std::optional<double> ambiguous_remove_above;
};

struct TrainResult {
    ScatterSummary scatter;
    FocusSpectrum spectrum;
    SpectrumPartition partition;
    FocusModel model;
};

inline TrainResult train(const SufficientStats& stats, const TrainOptions& options = {}) {
    validate_thresholds(options.cutoff, options.zero_tol);
    auto scatter = summarize(stats, options.weighting);
    const double eps = options.epsilon_abs ? *options.epsilon_abs : default_epsilon(scatter.c_all, options.epsilon_rel);
    auto spectrum = solve(scatter.c_within, scatter.c_all, eps);
    auto part = partition(spectrum, options.cutoff, options.zero_tol);
    auto model = build_mapping(spectrum, part, options.ambiguous_remove_above);
    return {std::move(scatter), std::move(spectrum), std::move(part), std::move(model)};
}

inline TrainResult train(const SetCollection& sets, const TrainOptions& options = {}) {
    return train(SufficientStats::from_sets(sets), options);
}

}  // namespace focus
