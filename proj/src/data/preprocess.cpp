#include "erslp/data/preprocess.hpp"

#include "erslp/util/error.hpp"

#include <algorithm>
#include <cmath>

namespace erslp {

std::size_t TransformCode::depth() const noexcept {
    switch (code) {
        case 2:
        case 5: return 1;
        case 3:
        case 6:
        case 7: return 2;
        default: return 0;
    }
}

std::vector<double> transform_series(std::span<const double> x, TransformCode code, const std::string& name) {
    if (!TransformCode::valid(code.code)) {
        throw DataError("transform: invalid code " + std::to_string(code.code) + " for '" + name + "'");
    }
    const std::size_t n = x.size();
    std::vector<double> base(x.begin(), x.end());
    if (code.uses_log()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (is_missing(base[i])) continue;
            if (base[i] <= 0.0) {
                throw DataError("transform: log of nonpositive value in column '" + name + "' at row " +
                                std::to_string(i + 1));
            }
            base[i] = std::log(base[i]);
        }
    }
    std::vector<double> out(n, kMissing);
    for (std::size_t t = code.depth(); t < n; ++t) {
        switch (code.code) {
            case 1:
            case 4: out[t] = base[t]; break;
            case 2:
            case 5: out[t] = base[t] - base[t - 1]; break;
            case 3:
            case 6: out[t] = base[t] - 2.0 * base[t - 1] + base[t - 2]; break;
            case 7: out[t] = (base[t] / base[t - 1] - 1.0) - (base[t - 1] / base[t - 2] - 1.0); break;
            default: break;
        }
    }
    return out;
}

TimeSeriesPanel apply_transforms(const TimeSeriesPanel& panel, const std::vector<TransformCode>& codes) {
    if (codes.size() != panel.num_variables()) {
        throw DataError("apply_transforms: " + std::to_string(codes.size()) + " codes for " +
                        std::to_string(panel.num_variables()) + " variables");
    }
    std::size_t trim = 0;
    for (const auto& c : codes) trim = std::max(trim, c.depth());
    if (panel.num_periods() <= trim) {
        throw DataError("apply_transforms: " + std::to_string(panel.num_periods()) +
                        " observations cannot support differencing depth " + std::to_string(trim));
    }
    TimeSeriesPanel out = panel.slice_rows(trim, panel.num_periods());
    for (std::size_t j = 0; j < panel.num_variables(); ++j) {
        const auto transformed = transform_series(panel.values.col(j), codes[j], panel.names[j]);
        auto dst = out.values.col(j);
        std::copy(transformed.begin() + static_cast<std::ptrdiff_t>(trim), transformed.end(), dst.begin());
    }
    return out;
}

namespace {

void interpolate_column(std::span<double> col, const std::string& name) {
    const std::size_t n = col.size();
    std::size_t prev = n;  // last observed index
    for (std::size_t i = 0; i < n; ++i) {
        if (is_missing(col[i])) continue;
        if (prev == n) {
            for (std::size_t k = 0; k < i; ++k) col[k] = col[i];
        } else if (i > prev + 1) {
            const double a = col[prev];
            const double b = col[i];
            const double span = static_cast<double>(i - prev);
            for (std::size_t k = prev + 1; k < i; ++k) col[k] = a + (b - a) * static_cast<double>(k - prev) / span;
        }
        prev = i;
    }
    if (prev == n) throw DataError("handle_missing: column '" + name + "' is entirely missing");
    for (std::size_t k = prev + 1; k < n; ++k) col[k] = col[prev];
}

}  // namespace

TimeSeriesPanel handle_missing(const TimeSeriesPanel& panel, MissingOptions options) {
    if (!(options.max_missing_fraction >= 0.0 && options.max_missing_fraction <= 1.0)) {
        throw ConfigError("data.max_missing_fraction: must lie in [0, 1]");
    }
    switch (options.policy) {
        case MissingPolicy::drop_rows: {
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < panel.num_periods(); ++i) {
                bool complete = true;
                for (std::size_t j = 0; j < panel.num_variables() && complete; ++j) {
                    complete = !is_missing(panel.values(i, j));
                }
                if (complete) keep.push_back(i);
            }
            if (keep.empty()) throw DataError("handle_missing: every row has a missing cell");
            return panel.select_rows(keep);
        }
        case MissingPolicy::drop_variable: {
            std::vector<std::size_t> drop;
            const double t = static_cast<double>(panel.num_periods());
            for (std::size_t j = 0; j < panel.num_variables(); ++j) {
                const auto col = panel.values.col(j);
                const double missing = static_cast<double>(std::count_if(col.begin(), col.end(), is_missing));
                if (missing / t > options.max_missing_fraction) drop.push_back(j);
            }
            TimeSeriesPanel out = panel.drop_columns(drop);
            for (std::size_t j = 0; j < out.num_variables(); ++j) interpolate_column(out.values.col(j), out.names[j]);
            return out;
        }
        case MissingPolicy::interpolate: {
            TimeSeriesPanel out = panel;
            for (std::size_t j = 0; j < out.num_variables(); ++j) interpolate_column(out.values.col(j), out.names[j]);
            return out;
        }
    }
    return panel;
}

std::vector<ColumnStats> column_stats(const TimeSeriesPanel& panel, std::size_t begin, std::size_t end) {
    if (end > panel.num_periods() || begin >= end) throw InputError("standardize: empty or out-of-range window");
    if (end - begin < 2) throw InputError("standardize: window needs at least 2 rows");
    const double n = static_cast<double>(end - begin);
    std::vector<ColumnStats> stats(panel.num_variables());
    for (std::size_t j = 0; j < panel.num_variables(); ++j) {
        const auto col = panel.values.col(j);
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += col[i];
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t i = begin; i < end; ++i) ss += (col[i] - mean) * (col[i] - mean);
        const double sd = std::sqrt(ss / (n - 1.0));
        if (!std::isfinite(sd)) throw DataError("standardize: column '" + panel.names[j] + "' has non-finite values");
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
            throw DataError("standardize: column '" + panel.names[j] + "' has zero variance over the window");
        }
        stats[j] = {mean, sd};
    }
    return stats;
}

TimeSeriesPanel apply_standardization(const TimeSeriesPanel& panel, const std::vector<ColumnStats>& stats) {
    if (stats.size() != panel.num_variables()) throw InputError("apply_standardization: stats size mismatch");
    TimeSeriesPanel out = panel;
    for (std::size_t j = 0; j < out.num_variables(); ++j) {
        for (double& v : out.values.col(j)) v = (v - stats[j].mean) / stats[j].sd;
    }
    return out;
}

Standardized standardize(const TimeSeriesPanel& panel, std::size_t begin, std::size_t end) {
    auto stats = column_stats(panel, begin, end);
    return {apply_standardization(panel, stats), std::move(stats)};
}

}  // namespace erslp
