#pragma once

#include "erslp/linalg/matrix.hpp"

#include <cmath>
#include <limits>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erslp {

/// Which panel variable plays which part in the local projection.
struct VariableRoles {
    std::string target;
    std::string shock;
    std::vector<std::string> essential;
    std::vector<std::string> high_dimensional;
};

/// Column indices into a panel, resolved from VariableRoles.
struct ResolvedRoles {
    std::size_t target = 0;
    std::size_t shock = 0;
    std::vector<std::size_t> essential;
    std::vector<std::size_t> controls;
};

inline bool is_missing(double v) noexcept { return std::isnan(v); }
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Aligned multivariate time series. values is T x n with NaN marking missing cells.
struct TimeSeriesPanel {
    std::vector<std::string> dates;
    /// Ordinal month index of each row (year * 12 + month - 1); strictly increasing
    /// with constant spacing (1 monthly, 3 quarterly).
    std::vector<long> periods;
    std::vector<std::string> names;
    Matrix values;
    /// variable name -> category label
    std::map<std::string, std::string> categories;
    /// Simulation-only annotations.
    std::optional<std::vector<std::string>> relevant_controls;
    std::optional<std::vector<double>> true_irf;

    [[nodiscard]] std::size_t num_periods() const noexcept { return values.rows(); }
    [[nodiscard]] std::size_t num_variables() const noexcept { return values.cols(); }
    [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const;
    [[nodiscard]] std::size_t index_of(const std::string& name) const;
    [[nodiscard]] std::size_t count_missing() const;

    /// Rows [begin, end), annotations preserved.
    [[nodiscard]] TimeSeriesPanel slice_rows(std::size_t begin, std::size_t end) const;
    /// Arbitrary rows; dates and periods follow the chosen rows, so the result is only a
    /// valid time index when rows are increasing with constant stride.
    [[nodiscard]] TimeSeriesPanel select_rows(const std::vector<std::size_t>& rows) const;
    [[nodiscard]] TimeSeriesPanel drop_columns(const std::vector<std::size_t>& columns) const;

    /// Throws DataError when shape, time index or names are inconsistent.
    void validate_structure() const;
};

/// Validates existence and disjointness of every role.
[[nodiscard]] ResolvedRoles resolve_roles(const TimeSeriesPanel& panel, const VariableRoles& roles);

/// Category label per high-dimensional control, in role order. Controls without a label
/// raise a ConfigError.
[[nodiscard]] std::vector<std::string> control_categories(const TimeSeriesPanel& panel,
                                                          const VariableRoles& roles);

/// Parses "M/D/YYYY", "YYYY-MM-DD" or "YYYY-MM" into an ordinal month.
[[nodiscard]] std::optional<long> parse_period(const std::string& text);
[[nodiscard]] std::string format_period(long period);

}  // namespace erslp
