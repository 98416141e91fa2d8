#pragma once

#include "erslp/benchmarks/estimators.hpp"
#include "erslp/data/panel.hpp"
#include "erslp/data/preprocess.hpp"
#include "erslp/data/synthetic.hpp"
#include "erslp/eval/experiments.hpp"
#include "erslp/eval/rolling.hpp"
#include "erslp/inference/bootstrap.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erslp::cli {

struct DataConfig {
    std::optional<std::string> path;
    std::optional<SyntheticSpec> synthetic;
    /// Truth sidecar written by `simulate`; supplies roles, categories and annotations.
    std::optional<std::string> truth;
    std::optional<VariableRoles> roles;
    std::map<std::string, std::string> categories;
    MissingOptions missing;
    bool transform = true;
    /// Full-sample standardization before one-shot estimation.
    bool standardize = false;
};

struct InferenceSettings {
    bool enabled = false;
    BootstrapConfig bootstrap;
};

struct EvalSettings {
    RollingWindowSpec windows;
    std::vector<std::size_t> horizons{1, 3, 6};
};

struct OutputConfig {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
};

struct MonteCarloSettings {
    std::size_t n_reps = 20;
    /// Empty means the main estimator plus the benchmarks.
    std::vector<EstimatorSpec> estimators;
};

struct RunConfig {
    std::uint64_t seed = 0;
    DataConfig data;
    EstimatorSpec estimator;
    std::vector<EstimatorSpec> benchmarks;
    InferenceSettings inference;
    EvalSettings eval;
    std::vector<AblationToggle> ablation;
    MonteCarloSettings montecarlo;
    OutputConfig output;
    std::size_t workers = 0;
};

/// Validates everything and fills defaults; errors are ConfigError with the JSON path.
[[nodiscard]] RunConfig parse_run_config(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json read_config_file(const std::filesystem::path& path);

/// Resolved configuration with every default spelled out. workers and
/// output.directory are left out so artifacts do not depend on where or how
/// parallel a run happened.
[[nodiscard]] nlohmann::ordered_json to_json(const RunConfig& config);

/// Applies "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

[[nodiscard]] nlohmann::ordered_json to_json(const SyntheticSpec& spec);
[[nodiscard]] nlohmann::ordered_json to_json(const EstimatorSpec& spec);
[[nodiscard]] nlohmann::ordered_json to_json(const VariableRoles& roles);

}  // namespace erslp::cli
