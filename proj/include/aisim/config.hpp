#pragma once

#include "aisim/harness.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aisim::harness {

/// An experiment file. One file can drive every CLI subcommand: `scenario` is
/// the single run, the sweep axes and campaign settings reuse it as template.
///
///   {
///     "id": "rts96", "grid": "../grids/rts96_like.json", "seed": 42,
///     "sample_params": false,
///     "vsgs": {"ids": [..]} | {"fraction": 0.25} | {"areas": ["A"]},
///     "alpha": 5, "beta": 5, "m_min_rule": 0.3333333333333333,
///     "per_vsg": [{"id": 6, "alpha": 5, "beta": 5}],
///     "policy": {"mode": "plain" | "deadband" | "rearm", "epsilon": 1e-4,
///                "band": .., "hold": .., "m_reset": {"6": 0.5}},
///     "fault": {"node": 6, "delta_P": -1.0, "time": 0},
///     "integration": {"rtol": 1e-8, "atol": 1e-10, "t_end": 120, "sample_dt": 1e-3},
///     "metrics": {"tail_fraction": 1e-4},
///     "sweep": {"alpha": [..] | {"log": [0.1, 50, 10], "anchors": [5, 10]}, "beta": ..},
///     "campaign": {"threshold_mw": 100, "delta_mw": -100, "base_mva": 100,
///                  "central_fraction": 0.5,
///                  "candidate": {"name": "adaptive", "vsgs": {..}},
///                  "reference": {"name": "constant", "vsgs": {..}}},
///     "placement": {"peripheral": {"ids": [..]}, "homogeneous": {"ids": [..]}}
///   }
///
/// The grid path is relative to the config file.
struct Config {
    std::string path;
    std::uint64_t hash = 0;  ///< FNV-1a of the file text
    Scenario scenario;
    std::vector<double> alphas = default_axis();
    std::vector<double> betas = default_axis();
    CampaignSpec campaign;
    CampaignSpec placement;
    bool has_placement = false;
};

[[nodiscard]] Config parse_config(std::string_view text, const std::string& base_dir);
[[nodiscard]] Config load_config(const std::string& path);

[[nodiscard]] std::uint64_t fnv1a(std::string_view text) noexcept;

}  // namespace aisim::harness
