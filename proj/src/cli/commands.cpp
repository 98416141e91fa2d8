#include "erslp/cli/commands.hpp"

#include "erslp/data/fredmd.hpp"
#include "erslp/eval/report_io.hpp"
#include "erslp/util/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace erslp::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Input:
        case ErrorKind::Data: return 3;
        case ErrorKind::Numerical:
        case ErrorKind::Inference: return 4;
    }
    return 1;
}

namespace {

fs::path output_dir(const RunConfig& c) {
    const fs::path dir(c.output.directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("output.directory: cannot create '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("output: cannot write '" + path.string() + "'");
    os << text;
    if (!os) throw DataError("output: write failed for '" + path.string() + "'");
}

ordered_json provenance(const RunConfig& c, const std::string& command) {
    return {{"schema_version", kSchemaVersion}, {"command", command}, {"seed", c.seed}, {"config", to_json(c)}};
}

void write_csv(const fs::path& path, const std::string& text, const RunConfig& c, const std::string& command,
               std::ostream& log) {
    write_text(path, text);
    fs::path side = path;
    side.replace_extension(".provenance.json");
    write_text(side, provenance(c, command).dump(2) + "\n");
    log << "wrote " << path.string() << '\n';
}

void write_json(const fs::path& path, ordered_json body, const RunConfig& c, const std::string& command,
                std::ostream& log) {
    ordered_json doc = provenance(c, command);
    doc["result"] = std::move(body);
    write_text(path, doc.dump(2) + "\n");
    log << "wrote " << path.string() << '\n';
}

template <class Writer>
std::string render(Writer w) {
    std::ostringstream os;
    w(os);
    return os.str();
}

void fill_high_dimensional(VariableRoles& roles, const TimeSeriesPanel& panel) {
    if (!roles.high_dimensional.empty()) return;
    std::set<std::string> used{roles.target, roles.shock};
    used.insert(roles.essential.begin(), roles.essential.end());
    for (const auto& n : panel.names) {
        if (!used.count(n)) roles.high_dimensional.push_back(n);
    }
}

std::vector<EstimatorSpec> all_estimators(const RunConfig& c) {
    std::vector<EstimatorSpec> out{c.estimator};
    out.insert(out.end(), c.benchmarks.begin(), c.benchmarks.end());
    std::set<std::string> seen;
    for (const auto& e : out) {
        if (!seen.insert(e.label()).second) throw ConfigError("benchmarks: duplicate estimator label '" + e.label() + "'");
    }
    return out;
}

}  // namespace

LoadedData load_data(const RunConfig& c) {
    LoadedData d;
    if (c.data.synthetic) {
        SyntheticData syn = generate_synthetic(*c.data.synthetic);
        d.panel = std::move(syn.panel);
        d.roles = std::move(syn.roles);
    } else {
        const RawPanel raw = load_fredmd_csv(*c.data.path);
        d.panel = c.data.transform ? apply_transforms(raw.panel, raw.codes) : raw.panel;
        d.panel = handle_missing(d.panel, c.data.missing);
        std::optional<VariableRoles> sidecar_roles;
        if (c.data.truth) {
            std::ifstream in(*c.data.truth);
            if (!in) throw DataError("data.truth: cannot open '" + *c.data.truth + "'");
            json t;
            try {
                t = json::parse(in);
                if (t.contains("roles")) {
                    const json& r = t.at("roles");
                    VariableRoles vr;
                    vr.target = r.at("target").get<std::string>();
                    vr.shock = r.at("shock").get<std::string>();
                    vr.essential = r.value("essential", std::vector<std::string>{});
                    vr.high_dimensional = r.value("high_dimensional", std::vector<std::string>{});
                    sidecar_roles = vr;
                }
                if (t.contains("categories")) {
                    for (const auto& [k, v] : t.at("categories").items()) d.panel.categories[k] = v.get<std::string>();
                }
                if (t.contains("relevant_controls") && !t.at("relevant_controls").is_null()) {
                    d.panel.relevant_controls = t.at("relevant_controls").get<std::vector<std::string>>();
                }
                if (t.contains("true_irf") && !t.at("true_irf").is_null()) {
                    d.panel.true_irf = t.at("true_irf").get<std::vector<double>>();
                }
            } catch (const json::exception& e) {
                throw DataError("data.truth: malformed sidecar '" + *c.data.truth + "': " + e.what());
            }
        }
        if (c.data.roles) {
            d.roles = *c.data.roles;
        } else if (sidecar_roles) {
            d.roles = *sidecar_roles;
        } else {
            throw ConfigError("data.roles: required when data.path has no truth sidecar");
        }
    }
    if (c.data.synthetic && c.data.roles) d.roles = *c.data.roles;
    for (const auto& [k, v] : c.data.categories) d.panel.categories[k] = v;
    fill_high_dimensional(d.roles, d.panel);
    (void)resolve_roles(d.panel, d.roles);
    if (c.data.standardize) d.panel = standardize(d.panel, 0, d.panel.num_periods()).panel;
    return d;
}

void cmd_simulate(const RunConfig& c, std::ostream& log) {
    if (!c.data.synthetic) throw ConfigError("data.synthetic: missing block (required by simulate)");
    const SyntheticData syn = generate_synthetic(*c.data.synthetic);
    const fs::path dir = output_dir(c);
    const std::vector<TransformCode> codes(syn.panel.num_variables(), TransformCode{1});
    write_text(dir / "panel.csv", render([&](std::ostream& os) { write_fredmd_csv(os, syn.panel, codes); }));
    log << "wrote " << (dir / "panel.csv").string() << '\n';

    ordered_json truth = provenance(c, "simulate");
    truth["roles"] = to_json(syn.roles);
    ordered_json cats = ordered_json::object();
    for (const auto& [k, v] : syn.panel.categories) cats[k] = v;
    truth["categories"] = cats;
    truth["relevant_controls"] = syn.relevant_controls;
    truth["true_irf"] = syn.true_irf;
    truth["spec"] = to_json(syn.spec);
    write_text(dir / "panel.truth.json", truth.dump(2) + "\n");
    log << "wrote " << (dir / "panel.truth.json").string() << '\n';
}

void cmd_estimate(const RunConfig& c, std::ostream& log) {
    const LoadedData d = load_data(c);
    const std::vector<EstimatorSpec> specs = all_estimators(c);
    if (c.inference.enabled) c.inference.bootstrap.validate();
    std::vector<IrfRow> rows;
    std::vector<std::pair<std::size_t, SelectKResult>> curves;
    for (const EstimatorSpec& spec : specs) {
        const HorizonEstimator est = make_horizon_estimator(spec);
        for (std::size_t h : c.eval.horizons) {
            try {
                const HorizonDesign design = build_horizon_design(d.panel, d.roles, h);
                HorizonFit fit;
                if (spec.kind == EstimatorKind::rslp) {
                    RslpHorizonResult r = estimate_rslp_horizon(design, spec.rslp, c.seed);
                    if (r.selection && &spec == &specs.front()) curves.emplace_back(h, *r.selection);
                    fit = HorizonFit{r.ensemble.estimate, std::move(r.ensemble.predictor)};
                } else {
                    fit = est(design, c.seed);
                }
                IrfRow row{spec.label(), fit.estimate, std::nullopt};
                if (c.inference.enabled) {
                    row.interval = bootstrap_horizon(d.panel, d.roles, design, fit.estimate.beta,
                                                     make_replicate_estimator(spec, fit), c.inference.bootstrap);
                }
                rows.push_back(std::move(row));
            } catch (const Error& e) {
                rethrow_with_context(e, spec.label() + ", horizon " + std::to_string(h));
            }
        }
    }
    const fs::path dir = output_dir(c);
    if (c.output.csv) {
        write_csv(dir / "irf.csv", render([&](std::ostream& os) { write_irf_csv(os, rows); }), c, "estimate", log);
        if (!curves.empty()) {
            write_csv(dir / "k_curve.csv", render([&](std::ostream& os) { write_k_curve_csv(os, curves); }), c,
                      "estimate", log);
        }
    }
    if (c.output.json) {
        ordered_json body = ordered_json::array();
        for (const IrfRow& r : rows) body.push_back(to_json(r));
        ordered_json doc{{"irf", body}};
        if (!curves.empty()) {
            ordered_json kc = ordered_json::array();
            for (const auto& [h, sel] : curves) {
                ordered_json curve = ordered_json::array();
                for (const auto& [k, m] : sel.metric_curve) curve.push_back({{"k", k}, {"metric", m}});
                kc.push_back({{"horizon", h}, {"k_star", sel.k_star}, {"expansions", sel.expansions}, {"curve", curve}});
            }
            doc["k_selection"] = kc;
        }
        write_json(dir / "irf.json", doc, c, "estimate", log);
    }
}

void cmd_evaluate(const RunConfig& c, std::ostream& log) {
    const LoadedData d = load_data(c);
    c.eval.windows.validate(d.panel.num_periods());
    EvalOptions opts;
    opts.with_bootstrap = c.inference.enabled;
    opts.bootstrap = c.inference.bootstrap;
    std::vector<EvalReport> reports;
    for (const EstimatorSpec& spec : all_estimators(c)) {
        reports.push_back(run_rolling_eval(d.panel, d.roles, spec, c.eval.windows, c.eval.horizons, opts, c.seed));
    }
    const fs::path dir = output_dir(c);
    if (c.output.csv) {
        write_csv(dir / "eval_summary.csv", render([&](std::ostream& os) { write_eval_summary_csv(os, reports); }), c,
                  "evaluate", log);
        write_csv(dir / "eval_windows.csv", render([&](std::ostream& os) { write_eval_windows_csv(os, reports); }), c,
                  "evaluate", log);
    }
    if (c.output.json) {
        ordered_json body = ordered_json::array();
        for (const EvalReport& r : reports) body.push_back(to_json(r));
        write_json(dir / "eval.json", body, c, "evaluate", log);
    }
}

void cmd_ablate(const RunConfig& c, std::ostream& log) {
    const LoadedData d = load_data(c);
    c.eval.windows.validate(d.panel.num_periods());
    EvalOptions opts;
    opts.with_bootstrap = c.inference.enabled;
    opts.bootstrap = c.inference.bootstrap;
    const std::vector<AblationRow> rows =
        run_ablation(d.panel, d.roles, c.estimator, c.ablation, c.eval.windows, c.eval.horizons, opts, c.seed);
    const fs::path dir = output_dir(c);
    if (c.output.csv) {
        write_csv(dir / "ablation.csv", render([&](std::ostream& os) { write_ablation_csv(os, rows); }), c, "ablate",
                  log);
    }
    if (c.output.json) write_json(dir / "ablation.json", to_json(rows), c, "ablate", log);
}

void cmd_montecarlo(const RunConfig& c, std::ostream& log) {
    if (!c.data.synthetic) throw ConfigError("data.synthetic: missing block (required by montecarlo)");
    MonteCarloConfig mc;
    mc.dgps = {*c.data.synthetic};
    mc.estimators = c.montecarlo.estimators.empty() ? all_estimators(c) : c.montecarlo.estimators;
    mc.horizons = c.eval.horizons;
    mc.n_reps = c.montecarlo.n_reps;
    mc.with_bootstrap = c.inference.enabled;
    mc.bootstrap = c.inference.bootstrap;
    mc.seed = c.seed;
    const MonteCarloResult res = run_monte_carlo(mc);
    const fs::path dir = output_dir(c);
    if (c.output.csv) {
        write_csv(dir / "montecarlo.csv", render([&](std::ostream& os) { write_monte_carlo_csv(os, res); }), c,
                  "montecarlo", log);
        write_csv(dir / "montecarlo_summary.csv",
                  render([&](std::ostream& os) { write_monte_carlo_summary_csv(os, res); }), c, "montecarlo", log);
    }
    if (c.output.json) write_json(dir / "montecarlo.json", to_json(res), c, "montecarlo", log);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Enhanced random subspace local projections"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> workers;
    std::vector<std::string> overrides;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--seed", seed, "Master seed (overrides the config)");
        sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
        sub->add_option("--workers", workers, "Worker threads; 0 uses every core");
        sub->add_option("--set", overrides, "Override a config leaf: key.path=value");
    };
    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "Write a synthetic panel and its truth sidecar"},
        {"estimate", "Estimate impulse responses (with bootstrap intervals when enabled)"},
        {"evaluate", "Rolling-window evaluation of the estimator and benchmarks"},
        {"ablate", "Leave-one-component-out ablation table"},
        {"montecarlo", "Monte Carlo comparison on the synthetic design"}};
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << ordered_json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << '\n';
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        json doc = config_path.empty() ? json::object() : read_config_file(config_path);
        if (!doc.is_object()) throw ConfigError("config: top level must be an object");
        for (const std::string& o : overrides) apply_override(doc, o);
        if (seed) doc["seed"] = *seed;
        if (out_dir) doc["output"]["directory"] = *out_dir;
        if (workers) doc["workers"] = *workers;
        const RunConfig cfg = parse_run_config(doc);
        set_worker_count(cfg.workers);

        if (command == "simulate") cmd_simulate(cfg, out);
        else if (command == "estimate") cmd_estimate(cfg, out);
        else if (command == "evaluate") cmd_evaluate(cfg, out);
        else if (command == "ablate") cmd_ablate(cfg, out);
        else cmd_montecarlo(cfg, out);
        return 0;
    } catch (const Error& e) {
        err << ordered_json{{"error", {{"kind", to_string(e.kind())}, {"command", command}, {"message", e.what()}}}}.dump()
            << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << ordered_json{{"error", {{"kind", "internal"}, {"command", command}, {"message", e.what()}}}}.dump()
            << '\n';
        return 1;
    }
}

}  // namespace erslp::cli
