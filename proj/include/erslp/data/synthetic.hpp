#pragma once

#include "erslp/data/panel.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace erslp {

/// Simulated panel with a known impulse response:
///   x_t = rho x_{t-1} + u_t,                 u_t ~ N(0, 1)
///   y_t = beta0 x_{t-1} + phi y_{t-1} + c * sum_{i in R} g_{i,t-1} + noise_sd * e_t
/// High-dimensional controls g are equicorrelated N(0, 1) draws, iid over time,
/// split into n_categories contiguous groups. R holds n_relevant seeded control indices.
/// Essential controls: the first one mirrors y_t (the own-lag control), further ones are
/// independent AR(1) series with persistence rho.
struct SyntheticSpec {
    std::size_t T = 500;
    std::size_t q = 30;
    std::size_t p = 1;
    double rho = 0.5;
    double beta0 = 0.5;
    double phi = 0.4;
    double noise_sd = 1.0;
    double control_correlation = 0.3;
    std::uint64_t seed = 0;
    std::size_t n_categories = 5;
    std::size_t n_relevant = 0;
    double relevant_coefficient = 0.5;
    std::size_t burn_in = 200;
    std::size_t max_horizon = 24;

    /// Throws ConfigError with the offending field name.
    void validate() const;
};

struct SyntheticData {
    TimeSeriesPanel panel;
    VariableRoles roles;
    /// true_irf[h] for h = 0..max_horizon: response of y_{t+h} to a unit innovation in x_t.
    std::vector<double> true_irf;
    std::vector<std::string> relevant_controls;
    SyntheticSpec spec;
};

[[nodiscard]] SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Impulse response by direct recursion on the DGP: x_0 = 1, y_0 = 0.
[[nodiscard]] std::vector<double> synthetic_true_irf(const SyntheticSpec& spec);

}  // namespace erslp
