#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace petermann {

struct BasisConfig {
    std::string kind = "box";
    int n_modes = 0;
    double box_length = 0.0;
    int grid_points = 0;
    double omega_offset = 0.0;  // optional carrier added to every ω_n
};

struct ProfileConfig {
    std::string indicator;  // "uniform" | "interval" | "samples"
    std::optional<std::array<double, 2>> interval;
    std::optional<std::vector<double>> samples;
    double strength = 0.0;
};

struct ScenarioConfig {
    BasisConfig basis;
    ProfileConfig gain;
    std::optional<ProfileConfig> loss;
    bool threshold = false;  // rescale gain so γ = λ on the selected mode
    std::optional<double> target_frequency;
    std::optional<long long> seed;
};

// Parses and validates a single JSON document. Unknown fields, missing
// required fields and out-of-range values raise config_error naming the
// offending field path (e.g. "gain.strength").
ScenarioConfig parse_config(const std::string& text);

// Canonical JSON form (defaults filled in, fixed key order); the basis of
// sweeps and of the provenance hash.
nlohmann::ordered_json config_to_json(const ScenarioConfig& config);

// FNV-1a 64-bit over the canonical form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

} // namespace petermann
