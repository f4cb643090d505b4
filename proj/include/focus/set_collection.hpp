/**
 * @file set_collection.hpp
 * @brief Grouped training data: M sets of d-dimensional points.
 */

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "focus/errors.hpp"

namespace focus {

/// Row-major view of the data: every row of every set is one point.
struct SetCollection {
    std::vector<Eigen::MatrixXd> sets;

    [[nodiscard]] std::size_t size() const noexcept { return sets.size(); }

    [[nodiscard]] Eigen::Index dim() const noexcept {
        return sets.empty() ? 0 : sets.front().cols();
    }

    [[nodiscard]] Eigen::Index total_points() const noexcept {
        Eigen::Index n = 0;
        for (const auto& s : sets) n += s.rows();
        return n;
    }

    /// Throws unless M >= 1, every set is non-empty, and all sets share d.
    void validate() const {
        if (sets.empty()) throw EmptySetError("set collection holds no sets");
        const auto d = dim();
        for (std::size_t m = 0; m < sets.size(); ++m) {
            if (sets[m].rows() == 0)
                throw EmptySetError("set " + std::to_string(m) + " is empty");
            if (sets[m].cols() != d)
                throw DimensionError("set " + std::to_string(m) + " has " +
                                     std::to_string(sets[m].cols()) + " columns, expected " +
                                     std::to_string(d));
        }
    }
};

}  // namespace focus
