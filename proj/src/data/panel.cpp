#include "erslp/data/panel.hpp"

#include "erslp/util/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>

namespace erslp {

std::optional<std::size_t> TimeSeriesPanel::find(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

std::size_t TimeSeriesPanel::index_of(const std::string& name) const {
    const auto idx = find(name);
    if (!idx) throw ConfigError("variable '" + name + "' is not in the panel");
    return *idx;
}

std::size_t TimeSeriesPanel::count_missing() const {
    return static_cast<std::size_t>(
        std::count_if(values.data().begin(), values.data().end(), [](double v) { return is_missing(v); }));
}

TimeSeriesPanel TimeSeriesPanel::slice_rows(std::size_t begin, std::size_t end) const {
    if (begin > end || end > num_periods()) throw InputError("slice_rows: range out of bounds");
    std::vector<std::size_t> rows(end - begin);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = begin + i;
    return select_rows(rows);
}

TimeSeriesPanel TimeSeriesPanel::select_rows(const std::vector<std::size_t>& rows) const {
    TimeSeriesPanel out;
    out.names = names;
    out.categories = categories;
    out.relevant_controls = relevant_controls;
    out.true_irf = true_irf;
    out.values = values.select_rows(rows);
    out.dates.reserve(rows.size());
    out.periods.reserve(rows.size());
    for (std::size_t r : rows) {
        out.dates.push_back(dates[r]);
        out.periods.push_back(periods[r]);
    }
    return out;
}

TimeSeriesPanel TimeSeriesPanel::drop_columns(const std::vector<std::size_t>& columns) const {
    std::set<std::size_t> drop(columns.begin(), columns.end());
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < num_variables(); ++j) {
        if (!drop.count(j)) keep.push_back(j);
    }
    TimeSeriesPanel out = *this;
    out.values = values.select_cols(keep);
    out.names.clear();
    for (std::size_t j : keep) out.names.push_back(names[j]);
    for (std::size_t j : drop) out.categories.erase(names[j]);
    return out;
}

void TimeSeriesPanel::validate_structure() const {
    const std::size_t t = values.rows();
    if (dates.size() != t || periods.size() != t) throw DataError("panel: time index length differs from row count");
    if (names.size() != values.cols()) throw DataError("panel: name count differs from column count");
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (!seen.insert(n).second) throw DataError("panel: duplicate variable name '" + n + "'");
    }
    if (t >= 2) {
        const long step = periods[1] - periods[0];
        if (step <= 0) throw DataError("panel: timestamps are not strictly increasing at row 2");
        for (std::size_t i = 2; i < t; ++i) {
            if (periods[i] - periods[i - 1] != step) {
                throw DataError("panel: timestamps are not evenly spaced at " + dates[i]);
            }
        }
    }
}

ResolvedRoles resolve_roles(const TimeSeriesPanel& panel, const VariableRoles& roles) {
    if (roles.target.empty()) throw ConfigError("roles.target: missing");
    if (roles.shock.empty()) throw ConfigError("roles.shock: missing");
    ResolvedRoles out;
    std::set<std::size_t> used;
    auto claim = [&](const std::string& name, const char* role) {
        const auto idx = panel.find(name);
        if (!idx) throw ConfigError(std::string("roles.") + role + ": variable '" + name + "' is not in the panel");
        if (!used.insert(*idx).second) {
            throw ConfigError(std::string("roles.") + role + ": variable '" + name + "' is assigned more than one role");
        }
        return *idx;
    };
    out.target = claim(roles.target, "target");
    out.shock = claim(roles.shock, "shock");
    for (const auto& n : roles.essential) out.essential.push_back(claim(n, "essential"));
    for (const auto& n : roles.high_dimensional) out.controls.push_back(claim(n, "high_dimensional"));
    return out;
}

std::vector<std::string> control_categories(const TimeSeriesPanel& panel, const VariableRoles& roles) {
    std::vector<std::string> labels;
    labels.reserve(roles.high_dimensional.size());
    for (const auto& n : roles.high_dimensional) {
        const auto it = panel.categories.find(n);
        if (it == panel.categories.end()) {
            throw ConfigError("data.categories: high-dimensional control '" + n + "' has no category label");
        }
        labels.push_back(it->second);
    }
    return labels;
}

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

}  // namespace

std::optional<long> parse_period(const std::string& text) {
    std::string_view s(text);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    int year = 0;
    int month = 0;
    int day = 1;
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto slash2 = s.find('/', slash + 1);
        if (slash2 == std::string_view::npos) return std::nullopt;
        if (!parse_int(s.substr(0, slash), month) || !parse_int(s.substr(slash + 1, slash2 - slash - 1), day) ||
            !parse_int(s.substr(slash2 + 1), year)) {
            return std::nullopt;
        }
    } else if (const auto dash = s.find('-'); dash != std::string_view::npos) {
        const auto dash2 = s.find('-', dash + 1);
        if (!parse_int(s.substr(0, dash), year)) return std::nullopt;
        if (dash2 == std::string_view::npos) {
            if (!parse_int(s.substr(dash + 1), month)) return std::nullopt;
        } else if (!parse_int(s.substr(dash + 1, dash2 - dash - 1), month) || !parse_int(s.substr(dash2 + 1), day)) {
            return std::nullopt;
        }
    } else {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    return static_cast<long>(year) * 12 + (month - 1);
}

std::string format_period(long period) {
    const long year = period / 12;
    const long month = period % 12 + 1;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%ld/1/%ld", month, year);
    return buf;
}

}  // namespace erslp
