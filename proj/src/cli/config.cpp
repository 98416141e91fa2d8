#include "erslp/cli/config.hpp"

#include "erslp/util/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace erslp::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError((path_.empty() ? "config" : path_) + ": " + msg); }

    [[nodiscard]] std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void expect_object() const {
        if (!j_.is_object()) fail("expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        expect_object();
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : j_.items()) {
            if (!ok.count(k)) throw ConfigError(key_path(k) + ": unknown key");
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    [[nodiscard]] Node child(const std::string& key) const { return {j_.at(key), key_path(key)}; }
    [[nodiscard]] const json& value() const { return j_; }
    [[nodiscard]] const std::string& path() const { return path_; }

    [[nodiscard]] std::uint64_t as_u64() const {
        if (j_.is_number_unsigned()) return j_.get<std::uint64_t>();
        if (j_.is_number_integer() && j_.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j_.get<std::int64_t>());
        fail("must be a nonnegative integer");
    }
    [[nodiscard]] double as_real() const {
        if (!j_.is_number()) fail("must be a number");
        const double v = j_.get<double>();
        if (!std::isfinite(v)) fail("must be finite");
        return v;
    }
    [[nodiscard]] std::string as_string() const {
        if (!j_.is_string()) fail("must be a string");
        return j_.get<std::string>();
    }
    [[nodiscard]] bool as_bool() const {
        if (!j_.is_boolean()) fail("must be true or false");
        return j_.get<bool>();
    }
    [[nodiscard]] std::vector<Node> elements() const {
        if (!j_.is_array()) fail("must be an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_.at(i), path_ + "[" + std::to_string(i) + "]");
        return out;
    }
    [[nodiscard]] std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (const Node& n : elements()) out.push_back(n.as_string());
        return out;
    }

    void read(const std::string& key, std::size_t& out) const {
        if (has(key)) out = static_cast<std::size_t>(child(key).as_u64());
    }
    void read(const std::string& key, std::uint64_t& out, int) const {
        if (has(key)) out = child(key).as_u64();
    }
    void read(const std::string& key, double& out) const {
        if (has(key)) out = child(key).as_real();
    }
    void read(const std::string& key, bool& out) const {
        if (has(key)) out = child(key).as_bool();
    }
    void read(const std::string& key, std::string& out) const {
        if (has(key)) out = child(key).as_string();
    }

private:
    const json& j_;
    std::string path_;
};

template <class E>
E pick(const Node& n, std::initializer_list<std::pair<const char*, E>> options) {
    const std::string s = n.as_string();
    std::string names;
    for (const auto& [name, v] : options) {
        if (s == name) return v;
        names += names.empty() ? name : std::string(", ") + name;
    }
    n.fail("unknown value '" + s + "' (expected one of " + names + ")");
}

SyntheticSpec parse_synthetic(const Node& n, std::uint64_t seed) {
    n.allow({"T", "q", "p", "rho", "beta0", "phi", "noise_sd", "control_correlation", "seed", "n_categories",
             "n_relevant", "relevant_coefficient", "burn_in", "max_horizon"});
    SyntheticSpec s;
    s.seed = seed;
    n.read("T", s.T);
    n.read("q", s.q);
    n.read("p", s.p);
    n.read("rho", s.rho);
    n.read("beta0", s.beta0);
    n.read("phi", s.phi);
    n.read("noise_sd", s.noise_sd);
    n.read("control_correlation", s.control_correlation);
    n.read("seed", s.seed, 0);
    n.read("n_categories", s.n_categories);
    n.read("n_relevant", s.n_relevant);
    n.read("relevant_coefficient", s.relevant_coefficient);
    n.read("burn_in", s.burn_in);
    n.read("max_horizon", s.max_horizon);
    try {
        s.validate();
    } catch (const ConfigError& e) {
        rethrow_with_context(e, n.path());
    }
    return s;
}

VariableRoles parse_roles(const Node& n) {
    n.allow({"target", "shock", "essential", "high_dimensional"});
    VariableRoles r;
    if (!n.has("target")) n.fail("missing key 'target'");
    if (!n.has("shock")) n.fail("missing key 'shock'");
    r.target = n.child("target").as_string();
    r.shock = n.child("shock").as_string();
    if (n.has("essential")) r.essential = n.child("essential").strings();
    if (n.has("high_dimensional")) r.high_dimensional = n.child("high_dimensional").strings();
    return r;
}

AdaptiveKConfig parse_adaptive(const Node& n) {
    n.allow({"k_min", "k_max", "k_step", "expansion_factor", "tau", "metric", "n_folds", "max_expansions"});
    AdaptiveKConfig a;
    n.read("k_min", a.k_min);
    n.read("k_max", a.k_max);
    n.read("k_step", a.k_step);
    n.read("expansion_factor", a.expansion_factor);
    n.read("tau", a.tau);
    n.read("n_folds", a.n_folds);
    n.read("max_expansions", a.max_expansions);
    if (n.has("metric") && n.child("metric").as_string() != "cv_mspe") n.child("metric").fail("only 'cv_mspe' is supported");
    return a;
}

std::vector<double> reals(const Node& n) {
    std::vector<double> out;
    for (const Node& e : n.elements()) out.push_back(e.as_real());
    return out;
}

EstimatorSpec parse_estimator(const Node& n) {
    n.allow({"kind", "name", "n_subspaces", "k", "adaptive_k", "weights", "sampler", "holdout_fraction", "n_factors",
             "ridge", "elastic_net", "oracle_controls"});
    EstimatorSpec s;
    if (n.has("kind")) {
        try {
            s.kind = estimator_kind_from_string(n.child("kind").as_string());
        } catch (const ConfigError&) {
            n.child("kind").fail("unknown estimator '" + n.child("kind").as_string() + "'");
        }
    }
    n.read("name", s.name);
    RslpSettings& r = s.rslp;
    n.read("n_subspaces", r.n_subspaces);
    n.read("k", r.k);
    if (n.has("adaptive_k")) {
        const Node a = n.child("adaptive_k");
        if (a.value().is_boolean()) {
            if (a.as_bool()) r.adaptive = AdaptiveKConfig{};
        } else {
            r.adaptive = parse_adaptive(a);
        }
    }
    if (n.has("weights")) {
        const Node w = n.child("weights");
        const auto kinds = {std::pair{"equal", WeightKind::equal}, std::pair{"bic", WeightKind::bic},
                            std::pair{"inverse_mspe", WeightKind::inverse_mspe},
                            std::pair{"inverse_variance", WeightKind::inverse_variance}};
        if (w.value().is_string()) {
            r.weights.kind = pick(w, kinds);
        } else {
            w.allow({"kind", "lambda", "epsilon"});
            if (w.has("kind")) r.weights.kind = pick(w.child("kind"), kinds);
            w.read("lambda", r.weights.lambda);
            w.read("epsilon", r.weights.epsilon);
        }
    }
    if (n.has("sampler")) {
        const Node sm = n.child("sampler");
        const auto kinds = {std::pair{"uniform", SamplerKind::uniform}, std::pair{"stratified", SamplerKind::stratified}};
        if (sm.value().is_string()) {
            r.sampler.kind = pick(sm, kinds);
        } else {
            sm.allow({"kind", "quotas"});
            if (sm.has("kind")) r.sampler.kind = pick(sm.child("kind"), kinds);
            if (sm.has("quotas")) {
                const Node q = sm.child("quotas");
                q.expect_object();
                for (const auto& [cat, v] : q.value().items()) {
                    r.sampler.quotas[cat] = static_cast<std::size_t>(Node(v, q.key_path(cat)).as_u64());
                }
            }
        }
    }
    n.read("holdout_fraction", r.holdout_fraction);
    n.read("n_factors", s.factor.n_factors);
    if (n.has("ridge")) {
        const Node rn = n.child("ridge");
        rn.allow({"penalties", "n_folds"});
        if (rn.has("penalties")) s.ridge.penalties = reals(rn.child("penalties"));
        rn.read("n_folds", s.ridge.n_folds);
    }
    if (n.has("elastic_net")) {
        const Node en = n.child("elastic_net");
        en.allow({"l1", "l2", "n_folds", "max_iter", "tol"});
        if (en.has("l1")) s.elastic_net.l1 = reals(en.child("l1"));
        if (en.has("l2")) s.elastic_net.l2 = en.child("l2").as_real();
        en.read("n_folds", s.elastic_net.n_folds);
        en.read("max_iter", s.elastic_net.solver.max_iter);
        en.read("tol", s.elastic_net.solver.tol);
    }
    if (n.has("oracle_controls")) {
        std::vector<std::size_t> idx;
        for (const Node& e : n.child("oracle_controls").elements()) idx.push_back(static_cast<std::size_t>(e.as_u64()));
        s.oracle_controls = idx;
    }
    try {
        s.validate();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        // component messages are phrased relative to "estimator."
        if (n.path() != "estimator" && msg.rfind("estimator.", 0) == 0) {
            throw ConfigError(n.path() + msg.substr(std::string("estimator").size()));
        }
        throw;
    }
    return s;
}

std::vector<EstimatorSpec> parse_estimator_list(const Node& n) {
    std::vector<EstimatorSpec> out;
    for (const Node& e : n.elements()) out.push_back(parse_estimator(e));
    return out;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    const Node root(doc, "");
    root.allow({"seed", "data", "estimator", "benchmarks", "inference", "eval", "ablation", "montecarlo", "output",
                "workers"});
    RunConfig c;
    root.read("seed", c.seed, 0);
    root.read("workers", c.workers);

    if (!root.has("data")) throw ConfigError("data: missing block (needs data.path or data.synthetic)");
    const Node d = root.child("data");
    d.allow({"path", "synthetic", "truth", "roles", "categories", "missing", "transform", "standardize"});
    if (d.has("path") == d.has("synthetic")) d.fail("exactly one of data.path and data.synthetic is required");
    if (d.has("path")) c.data.path = d.child("path").as_string();
    if (d.has("synthetic")) c.data.synthetic = parse_synthetic(d.child("synthetic"), c.seed);
    if (d.has("truth")) c.data.truth = d.child("truth").as_string();
    if (d.has("roles")) c.data.roles = parse_roles(d.child("roles"));
    if (d.has("categories")) {
        const Node cat = d.child("categories");
        cat.expect_object();
        for (const auto& [name, v] : cat.value().items()) c.data.categories[name] = Node(v, cat.key_path(name)).as_string();
    }
    if (d.has("missing")) {
        const Node m = d.child("missing");
        m.allow({"policy", "max_missing_fraction"});
        if (m.has("policy")) {
            c.data.missing.policy = pick(m.child("policy"), {std::pair{"interpolate", MissingPolicy::interpolate},
                                                             std::pair{"drop_variable", MissingPolicy::drop_variable},
                                                             std::pair{"drop_rows", MissingPolicy::drop_rows}});
        }
        m.read("max_missing_fraction", c.data.missing.max_missing_fraction);
        if (!(c.data.missing.max_missing_fraction >= 0.0 && c.data.missing.max_missing_fraction <= 1.0)) {
            m.child("max_missing_fraction").fail("must lie in [0, 1]");
        }
    }
    d.read("transform", c.data.transform);
    d.read("standardize", c.data.standardize);

    if (root.has("estimator")) c.estimator = parse_estimator(root.child("estimator"));
    if (root.has("benchmarks")) c.benchmarks = parse_estimator_list(root.child("benchmarks"));

    c.inference.bootstrap.seed = c.seed;
    if (root.has("inference")) {
        const Node n = root.child("inference");
        n.allow({"enabled", "B", "block_length", "interval", "confidence", "unit", "seed"});
        BootstrapConfig& b = c.inference.bootstrap;
        n.read("enabled", c.inference.enabled);
        n.read("B", b.B);
        if (n.has("block_length")) {
            const Node bl = n.child("block_length");
            if (!(bl.value().is_string() && bl.as_string() == "auto")) b.block_length = static_cast<std::size_t>(bl.as_u64());
        }
        if (n.has("interval")) {
            b.interval = pick(n.child("interval"),
                              {std::pair{"percentile", IntervalMethod::percentile}, std::pair{"bca", IntervalMethod::bca}});
        }
        n.read("confidence", b.confidence);
        if (n.has("unit")) {
            b.unit = pick(n.child("unit"), {std::pair{"design_rows", ResampleUnit::design_rows},
                                            std::pair{"panel_rows", ResampleUnit::panel_rows}});
        }
        n.read("seed", b.seed, 0);
        b.validate();
    }

    if (root.has("eval")) {
        const Node n = root.child("eval");
        n.allow({"horizons", "train_length", "test_length", "step"});
        if (n.has("horizons")) {
            c.eval.horizons.clear();
            for (const Node& h : n.child("horizons").elements()) c.eval.horizons.push_back(static_cast<std::size_t>(h.as_u64()));
            if (c.eval.horizons.empty()) n.child("horizons").fail("must be nonempty");
            std::set<std::size_t> seen;
            for (std::size_t h : c.eval.horizons) {
                if (!seen.insert(h).second) n.child("horizons").fail("duplicate horizon " + std::to_string(h));
            }
        }
        n.read("train_length", c.eval.windows.train_length);
        n.read("test_length", c.eval.windows.test_length);
        n.read("step", c.eval.windows.step);
        if (c.eval.windows.step < 1) n.child("step").fail("must be at least 1");
    }

    if (root.has("ablation")) {
        const Node n = root.child("ablation");
        n.allow({"toggles"});
        if (n.has("toggles")) {
            for (const Node& t : n.child("toggles").elements()) {
                try {
                    const AblationToggle tg = ablation_toggle_from_string(t.as_string());
                    for (AblationToggle seen : c.ablation) {
                        if (seen == tg) t.fail("duplicate toggle");
                    }
                    c.ablation.push_back(tg);
                } catch (const ConfigError& e) {
                    if (std::string(e.what()).rfind(t.path(), 0) == 0) throw;
                    t.fail("unknown toggle '" + t.as_string() + "'");
                }
            }
        }
    }

    if (root.has("montecarlo")) {
        const Node n = root.child("montecarlo");
        n.allow({"n_reps", "estimators"});
        n.read("n_reps", c.montecarlo.n_reps);
        if (c.montecarlo.n_reps < 1) n.child("n_reps").fail("must be at least 1");
        if (n.has("estimators")) c.montecarlo.estimators = parse_estimator_list(n.child("estimators"));
    }

    if (root.has("output")) {
        const Node n = root.child("output");
        n.allow({"directory", "formats"});
        n.read("directory", c.output.directory);
        if (n.has("formats")) {
            c.output.csv = false;
            c.output.json = false;
            for (const Node& f : n.child("formats").elements()) {
                const std::string v = f.as_string();
                if (v == "csv") {
                    c.output.csv = true;
                } else if (v == "json") {
                    c.output.json = true;
                } else {
                    f.fail("unknown format '" + v + "' (expected csv or json)");
                }
            }
        }
    }
    return c;
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config: cannot open '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config: '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set: expected key.path=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &doc;
    std::string part;
    std::istringstream ks(key);
    std::vector<std::string> parts;
    while (std::getline(ks, part, '.')) {
        if (part.empty()) throw ConfigError("--set: empty path segment in '" + key + "'");
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw ConfigError("--set: '" + parts[i] + "' in '" + key + "' is not an object");
        if (!node->contains(parts[i]) || (*node)[parts[i]].is_null()) (*node)[parts[i]] = json::object();
        node = &(*node)[parts[i]];
    }
    if (!node->is_object()) throw ConfigError("--set: parent of '" + key + "' is not an object");
    (*node)[parts.back()] = value;
}

namespace {

ordered_json real_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

const char* name_of(WeightKind k) {
    switch (k) {
        case WeightKind::equal: return "equal";
        case WeightKind::bic: return "bic";
        case WeightKind::inverse_mspe: return "inverse_mspe";
        case WeightKind::inverse_variance: return "inverse_variance";
    }
    return "equal";
}

const char* name_of(MissingPolicy p) {
    switch (p) {
        case MissingPolicy::interpolate: return "interpolate";
        case MissingPolicy::drop_variable: return "drop_variable";
        case MissingPolicy::drop_rows: return "drop_rows";
    }
    return "drop_variable";
}

}  // namespace

ordered_json to_json(const SyntheticSpec& s) {
    return {{"T", s.T},
            {"q", s.q},
            {"p", s.p},
            {"rho", s.rho},
            {"beta0", s.beta0},
            {"phi", s.phi},
            {"noise_sd", s.noise_sd},
            {"control_correlation", s.control_correlation},
            {"seed", s.seed},
            {"n_categories", s.n_categories},
            {"n_relevant", s.n_relevant},
            {"relevant_coefficient", s.relevant_coefficient},
            {"burn_in", s.burn_in},
            {"max_horizon", s.max_horizon}};
}

ordered_json to_json(const VariableRoles& r) {
    return {{"target", r.target}, {"shock", r.shock}, {"essential", r.essential}, {"high_dimensional", r.high_dimensional}};
}

ordered_json to_json(const EstimatorSpec& s) {
    const RslpSettings& r = s.rslp;
    ordered_json j{{"kind", to_string(s.kind)}, {"name", s.label()}};
    j["n_subspaces"] = r.n_subspaces;
    j["k"] = r.k;
    if (r.adaptive) {
        const AdaptiveKConfig& a = *r.adaptive;
        j["adaptive_k"] = {{"k_min", a.k_min},
                           {"k_max", a.k_max},
                           {"k_step", a.k_step},
                           {"expansion_factor", a.expansion_factor},
                           {"tau", real_or_null(a.tau)},
                           {"metric", "cv_mspe"},
                           {"n_folds", a.n_folds},
                           {"max_expansions", a.max_expansions}};
    } else {
        j["adaptive_k"] = nullptr;
    }
    j["weights"] = {{"kind", name_of(r.weights.kind)}, {"lambda", r.weights.lambda}, {"epsilon", r.weights.epsilon}};
    ordered_json quotas = ordered_json::object();
    for (const auto& [cat, m] : r.sampler.quotas) quotas[cat] = m;
    j["sampler"] = {{"kind", r.sampler.kind == SamplerKind::stratified ? "stratified" : "uniform"}, {"quotas", quotas}};
    j["holdout_fraction"] = r.holdout_fraction;
    j["n_factors"] = s.factor.n_factors;
    j["ridge"] = {{"penalties", s.ridge.penalties}, {"n_folds", s.ridge.n_folds}};
    j["elastic_net"] = {{"l1", s.elastic_net.l1},
                        {"l2", s.elastic_net.l2 ? ordered_json(*s.elastic_net.l2) : ordered_json(nullptr)},
                        {"n_folds", s.elastic_net.n_folds},
                        {"max_iter", s.elastic_net.solver.max_iter},
                        {"tol", s.elastic_net.solver.tol}};
    j["oracle_controls"] = s.oracle_controls ? ordered_json(*s.oracle_controls) : ordered_json(nullptr);
    return j;
}

ordered_json to_json(const RunConfig& c) {
    ordered_json data = ordered_json::object();
    data["path"] = c.data.path ? ordered_json(*c.data.path) : ordered_json(nullptr);
    data["synthetic"] = c.data.synthetic ? to_json(*c.data.synthetic) : ordered_json(nullptr);
    data["truth"] = c.data.truth ? ordered_json(*c.data.truth) : ordered_json(nullptr);
    data["roles"] = c.data.roles ? to_json(*c.data.roles) : ordered_json(nullptr);
    ordered_json cats = ordered_json::object();
    for (const auto& [k, v] : c.data.categories) cats[k] = v;
    data["categories"] = cats;
    data["missing"] = {{"policy", name_of(c.data.missing.policy)},
                       {"max_missing_fraction", c.data.missing.max_missing_fraction}};
    data["transform"] = c.data.transform;
    data["standardize"] = c.data.standardize;

    ordered_json benches = ordered_json::array();
    for (const auto& b : c.benchmarks) benches.push_back(to_json(b));
    ordered_json mc_est = ordered_json::array();
    for (const auto& b : c.montecarlo.estimators) mc_est.push_back(to_json(b));
    ordered_json toggles = ordered_json::array();
    for (AblationToggle t : c.ablation) toggles.push_back(to_string(t));
    ordered_json formats = ordered_json::array();
    if (c.output.csv) formats.push_back("csv");
    if (c.output.json) formats.push_back("json");

    const BootstrapConfig& b = c.inference.bootstrap;
    ordered_json out;
    out["seed"] = c.seed;
    out["data"] = data;
    out["estimator"] = to_json(c.estimator);
    out["benchmarks"] = benches;
    out["inference"] = {{"enabled", c.inference.enabled},
                        {"B", b.B},
                        {"block_length", b.block_length ? ordered_json(*b.block_length) : ordered_json("auto")},
                        {"interval", to_string(b.interval)},
                        {"confidence", b.confidence},
                        {"unit", b.unit == ResampleUnit::panel_rows ? "panel_rows" : "design_rows"},
                        {"seed", b.seed}};
    out["eval"] = {{"horizons", c.eval.horizons},
                   {"train_length", c.eval.windows.train_length},
                   {"test_length", c.eval.windows.test_length},
                   {"step", c.eval.windows.step}};
    out["ablation"] = {{"toggles", toggles}};
    out["montecarlo"] = {{"n_reps", c.montecarlo.n_reps}, {"estimators", mc_est}};
    out["output"] = {{"formats", formats}};
    return out;
}

}  // namespace erslp::cli
