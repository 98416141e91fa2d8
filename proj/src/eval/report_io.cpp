#include "erslp/eval/report_io.hpp"

#include <cmath>
#include <cstdio>

namespace erslp {

using nlohmann::ordered_json;

std::string format_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

namespace {

std::optional<double> lookup(const std::map<std::size_t, double>& m, std::size_t h) {
    const auto it = m.find(h);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

ordered_json number_or_null(const std::optional<double>& v) {
    if (v && std::isfinite(*v)) return *v;
    return nullptr;
}

ordered_json horizon_map(const std::map<std::size_t, double>& m) {
    ordered_json j = ordered_json::object();
    for (const auto& [h, v] : m) j[std::to_string(h)] = number_or_null(v);
    return j;
}

ordered_json mean_se_json(const MeanSe& m) { return {{"mean", number_or_null(m.mean)}, {"se", number_or_null(m.se)}}; }

}  // namespace

void write_irf_csv(std::ostream& os, const std::vector<IrfRow>& rows) {
    os << "horizon,estimator,beta,lower,upper,width,method,B,block_length,selected_k,subspace_std,n_effective,"
          "weights_entropy\n";
    for (const IrfRow& r : rows) {
        const IrfEstimate& e = r.estimate;
        os << e.horizon << ',' << r.estimator << ',' << format_number(e.beta) << ',';
        if (r.interval) {
            const ConfidenceInterval& ci = *r.interval;
            os << format_number(ci.lower) << ',' << format_number(ci.upper) << ',' << format_number(ci.width) << ','
               << to_string(ci.method) << ',' << ci.B << ',' << ci.block_length;
        } else {
            os << ",,,,,";
        }
        os << ',' << e.selected_k << ',' << format_number(e.subspace_std) << ',' << e.n_effective << ','
           << format_number(e.weights_entropy) << '\n';
    }
}

void write_k_curve_csv(std::ostream& os, const std::vector<std::pair<std::size_t, SelectKResult>>& curves) {
    os << "horizon,k,metric,selected\n";
    for (const auto& [h, sel] : curves) {
        for (const auto& [k, m] : sel.metric_curve) {
            os << h << ',' << k << ',' << format_number(m) << ',' << (k == sel.k_star ? 1 : 0) << '\n';
        }
    }
}

void write_eval_summary_csv(std::ostream& os, const std::vector<EvalReport>& reports) {
    os << "estimator,horizon,n_windows,mspe,stability,mean_beta,mean_subspace_std,coverage,avg_width,irf_error\n";
    for (const EvalReport& r : reports) {
        for (std::size_t h : r.horizons) {
            os << r.estimator << ',' << h << ',' << r.n_windows << ',' << format_number(lookup(r.mspe, h)) << ','
               << format_number(lookup(r.stability, h)) << ',' << format_number(lookup(r.mean_beta, h)) << ','
               << format_number(lookup(r.mean_subspace_std, h)) << ',' << format_number(lookup(r.coverage, h)) << ','
               << format_number(lookup(r.avg_width, h)) << ',' << format_number(r.irf_error) << '\n';
        }
    }
}

void write_eval_windows_csv(std::ostream& os, const std::vector<EvalReport>& reports) {
    os << "estimator,window,horizon,train_begin,test_begin,test_end,beta,subspace_std,selected_k,sse,n_forecasts,"
          "lower,upper,reference\n";
    for (const EvalReport& r : reports) {
        for (const WindowRecord& w : r.windows) {
            os << r.estimator << ',' << w.window << ',' << w.horizon << ',' << w.train_begin << ',' << w.test_begin
               << ',' << w.test_end << ',' << format_number(w.beta) << ',' << format_number(w.subspace_std) << ','
               << w.selected_k << ',' << format_number(w.sse) << ',' << w.n_forecasts << ','
               << format_number(w.lower) << ',' << format_number(w.upper) << ',' << format_number(w.reference)
               << '\n';
        }
    }
}

void write_monte_carlo_csv(std::ostream& os, const MonteCarloResult& result) {
    os << "dgp,estimator,horizon,n_reps,true_beta,mean_beta,se_beta,mse,se_mse,mean_subspace_std,se_subspace_std,"
          "mean_selected_k,mean_width,se_width,coverage,se_coverage\n";
    for (const MonteCarloCell& c : result.cells) {
        os << c.dgp << ',' << c.estimator << ',' << c.horizon << ',' << c.n_reps << ',' << format_number(c.true_beta)
           << ',' << format_number(c.beta.mean) << ',' << format_number(c.beta.se) << ','
           << format_number(c.squared_error.mean) << ',' << format_number(c.squared_error.se) << ','
           << format_number(c.subspace_std.mean) << ',' << format_number(c.subspace_std.se) << ','
           << format_number(c.selected_k.mean) << ',';
        if (c.width && c.coverage) {
            os << format_number(c.width->mean) << ',' << format_number(c.width->se) << ','
               << format_number(c.coverage->mean) << ',' << format_number(c.coverage->se);
        } else {
            os << ",,,";
        }
        os << '\n';
    }
}

void write_monte_carlo_summary_csv(std::ostream& os, const MonteCarloResult& result) {
    os << "dgp,estimator,irf_error,se_irf_error\n";
    for (const MonteCarloSummary& s : result.summaries) {
        os << s.dgp << ',' << s.estimator << ',' << format_number(s.irf_error.mean) << ','
           << format_number(s.irf_error.se) << '\n';
    }
}

void write_ablation_csv(std::ostream& os, const std::vector<AblationRow>& rows) {
    os << "config,horizon,mspe,stability,avg_width,delta_mspe,delta_stability,delta_width\n";
    for (const AblationRow& r : rows) {
        for (std::size_t h : r.report.horizons) {
            os << r.config << ',' << h << ',' << format_number(lookup(r.report.mspe, h)) << ','
               << format_number(lookup(r.report.stability, h)) << ',' << format_number(lookup(r.report.avg_width, h))
               << ',';
            if (r.toggle) {
                os << format_number(lookup(r.delta_mspe, h)) << ',' << format_number(lookup(r.delta_stability, h))
                   << ',' << format_number(lookup(r.delta_width, h));
            } else {
                os << ",,";
            }
            os << '\n';
        }
    }
}

ordered_json to_json(const IrfRow& row) {
    const IrfEstimate& e = row.estimate;
    ordered_json j{{"horizon", e.horizon},
                   {"estimator", row.estimator},
                   {"beta", number_or_null(e.beta)},
                   {"selected_k", e.selected_k},
                   {"subspace_std", number_or_null(e.subspace_std)},
                   {"n_effective", e.n_effective},
                   {"weights_entropy", number_or_null(e.weights_entropy)}};
    if (row.interval) {
        const ConfidenceInterval& ci = *row.interval;
        j["interval"] = {{"lower", number_or_null(ci.lower)},
                         {"upper", number_or_null(ci.upper)},
                         {"width", number_or_null(ci.width)},
                         {"method", to_string(ci.method)},
                         {"B", ci.B},
                         {"block_length", ci.block_length},
                         {"n_failed", ci.n_failed}};
    } else {
        j["interval"] = nullptr;
    }
    return j;
}

ordered_json to_json(const EvalReport& r) {
    ordered_json windows = ordered_json::array();
    for (const WindowRecord& w : r.windows) {
        windows.push_back({{"window", w.window},
                           {"horizon", w.horizon},
                           {"train_begin", w.train_begin},
                           {"test_begin", w.test_begin},
                           {"test_end", w.test_end},
                           {"beta", number_or_null(w.beta)},
                           {"subspace_std", number_or_null(w.subspace_std)},
                           {"selected_k", w.selected_k},
                           {"sse", number_or_null(w.sse)},
                           {"n_forecasts", w.n_forecasts},
                           {"lower", number_or_null(w.lower)},
                           {"upper", number_or_null(w.upper)},
                           {"reference", number_or_null(w.reference)}});
    }
    return {{"estimator", r.estimator},
            {"horizons", r.horizons},
            {"n_windows", r.n_windows},
            {"mspe", horizon_map(r.mspe)},
            {"stability", horizon_map(r.stability)},
            {"mean_beta", horizon_map(r.mean_beta)},
            {"mean_subspace_std", horizon_map(r.mean_subspace_std)},
            {"coverage", horizon_map(r.coverage)},
            {"avg_width", horizon_map(r.avg_width)},
            {"irf_error", number_or_null(r.irf_error)},
            {"windows", windows}};
}

ordered_json to_json(const MonteCarloResult& result) {
    ordered_json cells = ordered_json::array();
    for (const MonteCarloCell& c : result.cells) {
        ordered_json j{{"dgp", c.dgp},
                       {"estimator", c.estimator},
                       {"horizon", c.horizon},
                       {"n_reps", c.n_reps},
                       {"true_beta", number_or_null(c.true_beta)},
                       {"beta", mean_se_json(c.beta)},
                       {"squared_error", mean_se_json(c.squared_error)},
                       {"subspace_std", mean_se_json(c.subspace_std)},
                       {"selected_k", mean_se_json(c.selected_k)}};
        j["width"] = c.width ? mean_se_json(*c.width) : ordered_json(nullptr);
        j["coverage"] = c.coverage ? mean_se_json(*c.coverage) : ordered_json(nullptr);
        cells.push_back(j);
    }
    ordered_json summaries = ordered_json::array();
    for (const MonteCarloSummary& s : result.summaries) {
        summaries.push_back({{"dgp", s.dgp}, {"estimator", s.estimator}, {"irf_error", mean_se_json(s.irf_error)}});
    }
    return {{"cells", cells}, {"summaries", summaries}};
}

ordered_json to_json(const std::vector<AblationRow>& rows) {
    ordered_json out = ordered_json::array();
    for (const AblationRow& r : rows) {
        out.push_back({{"config", r.config},
                       {"toggle", r.toggle ? ordered_json(to_string(*r.toggle)) : ordered_json(nullptr)},
                       {"report", to_json(r.report)},
                       {"delta_mspe", horizon_map(r.delta_mspe)},
                       {"delta_stability", horizon_map(r.delta_stability)},
                       {"delta_width", horizon_map(r.delta_width)}});
    }
    return out;
}

}  // namespace erslp
