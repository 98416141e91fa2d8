#pragma once

#include "erslp/data/panel.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace erslp {

/// FRED-MD stationarity transform codes:
/// 1 level, 2 first difference, 3 second difference, 4 log, 5 log first difference,
/// 6 log second difference, 7 first difference of the growth rate x_t / x_{t-1} - 1.
struct TransformCode {
    int code = 1;

    [[nodiscard]] static bool valid(int c) noexcept { return c >= 1 && c <= 7; }
    /// Leading observations consumed by the transform.
    [[nodiscard]] std::size_t depth() const noexcept;
    [[nodiscard]] bool uses_log() const noexcept { return code == 4 || code == 5 || code == 6; }
};

/// Transforms every column and trims max depth rows from the top so columns stay aligned.
/// Missing inputs propagate to every output they touch.
[[nodiscard]] TimeSeriesPanel apply_transforms(const TimeSeriesPanel& panel, const std::vector<TransformCode>& codes);

/// The transform of a single series, untrimmed: the first depth() entries are NaN.
[[nodiscard]] std::vector<double> transform_series(std::span<const double> x, TransformCode code,
                                                   const std::string& name = "series");

enum class MissingPolicy {
    interpolate,    // linear inside, nearest value at the edges
    drop_variable,  // drop columns above the missing threshold, interpolate what remains
    drop_rows,      // drop any row with a missing cell
};

struct MissingOptions {
    MissingPolicy policy = MissingPolicy::drop_variable;
    double max_missing_fraction = 0.1;
};

[[nodiscard]] TimeSeriesPanel handle_missing(const TimeSeriesPanel& panel, MissingOptions options = {});

struct ColumnStats {
    double mean = 0.0;
    double sd = 1.0;
};

struct Standardized {
    TimeSeriesPanel panel;
    std::vector<ColumnStats> stats;
};

/// Rescales every column to mean 0 / sample sd 1 using statistics from rows
/// [begin, end) only; rows outside the window are transformed with the same statistics.
[[nodiscard]] Standardized standardize(const TimeSeriesPanel& panel, std::size_t begin, std::size_t end);
[[nodiscard]] TimeSeriesPanel apply_standardization(const TimeSeriesPanel& panel,
                                                    const std::vector<ColumnStats>& stats);

/// Column statistics over rows [begin, end); throws on zero variance.
[[nodiscard]] std::vector<ColumnStats> column_stats(const TimeSeriesPanel& panel, std::size_t begin,
                                                    std::size_t end);

}  // namespace erslp
