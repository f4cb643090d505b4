/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every focus module.
 *
 * Each error class maps to a distinct process exit code so the CLI can
 * report failures without string matching.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace focus {

enum class ExitCode : int {
    Ok = 0,
    Unexpected = 1,
    Config = 2,
    Io = 3,
    Format = 4,
    Dimension = 5,
    EmptySet = 6,
    IndefiniteDenominator = 7,
    NumericInput = 8,
    DegenerateModel = 9,
    ModelVersion = 10,
    ModelCorrupt = 11,
    Scorer = 12,
    Metric = 13,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::Unexpected; }
};

#define FOCUS_DEFINE_ERROR(Name, Code)                                                   \
    class Name : public Error {                                                          \
    public:                                                                              \
        using Error::Error;                                                              \
        [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::Code; } \
    };

FOCUS_DEFINE_ERROR(ConfigError, Config)
FOCUS_DEFINE_ERROR(IoError, Io)
FOCUS_DEFINE_ERROR(FormatError, Format)
FOCUS_DEFINE_ERROR(DimensionError, Dimension)
FOCUS_DEFINE_ERROR(EmptySetError, EmptySet)
FOCUS_DEFINE_ERROR(NumericInputError, NumericInput)
FOCUS_DEFINE_ERROR(DegenerateModelError, DegenerateModel)
FOCUS_DEFINE_ERROR(ModelVersionError, ModelVersion)
FOCUS_DEFINE_ERROR(ModelCorruptError, ModelCorrupt)
FOCUS_DEFINE_ERROR(ScorerError, Scorer)
FOCUS_DEFINE_ERROR(MetricError, Metric)

#undef FOCUS_DEFINE_ERROR

/// Raised when C_all + eps*I fails to factor; carries the failing pivot.
class IndefiniteDenominatorError : public Error {
public:
    IndefiniteDenominatorError(std::size_t pivot, double value)
        : Error("denominator matrix is not positive definite: pivot " + std::to_string(pivot) +
                " = " + std::to_string(value)),
          pivot_(pivot) {}

    [[nodiscard]] std::size_t pivot_index() const noexcept { return pivot_; }
    [[nodiscard]] ExitCode exit_code() const noexcept override {
        return ExitCode::IndefiniteDenominator;
    }

private:
    std::size_t pivot_;
};

namespace detail {

inline void require_dim(bool ok, const std::string& what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace detail

}  // namespace focus
