#pragma once

#include "petermann/config.hpp"
#include "petermann/dynamics.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace petermann {

inline constexpr const char* kToolVersion = "0.1.0";
// Threshold tuning: |γ−λ|/λ below this after fixed-point iteration.
inline constexpr double kThresholdTol = 1e-10;
inline constexpr int kThresholdMaxIterations = 100;

// A config turned into concrete objects, with the gain already rescaled to
// threshold when requested.
struct Scenario {
    ModeBasis basis;
    CouplingMatrix gain;
    std::optional<CouplingMatrix> loss;
    double gain_scale = 1.0;       // cumulative threshold rescale factor
    int threshold_iterations = 0;  // fixed-point iterations used
};

Scenario realize(const ScenarioConfig& config);

// Fixed-point rescaling of the gain matrix until γ = λ on the dominant
// mode. Returns the scale factor applied; iteration count via out-param.
double tune_to_threshold(const ModeBasis& basis, CouplingMatrix& gain, const CouplingMatrix& loss,
                         std::optional<double> target_frequency, int& iterations);

struct DynamicsOutcome {
    std::string status = "skipped";  // pass | fail | skipped
    std::string reason;
    double slope = 0.0;
    double expected_slope = 0.0;
    double max_rel_deviation = 0.0;
};

struct RunOutput {
    QuasiModeReport report;
    double biorthogonality = 0.0;
    double completeness = 0.0;
    bool degenerate_spectrum = false;
    double norm_dev_N2 = 0.0;
    double norm_dev_N2_bar = 0.0;
    DynamicsOutcome dynamics;
    std::string hash;  // provenance: config hash
    double gain_scale = 1.0;
    int threshold_iterations = 0;
};

// Full pipeline: realize → assemble → eigendecompose → select → analyze,
// plus the spectral residual diagnostics.
RunOutput run_solve(const ScenarioConfig& config);

// run_solve plus the applicable dynamics verification: the gain-only noise
// law, or the threshold diffusion law when config.threshold is set.
RunOutput run_validate(const ScenarioConfig& config);

// One solve per value of the numeric config field at `param_path`
// (dot-separated, e.g. "gain.strength"); returns CSV text.
std::string run_sweep_csv(const ScenarioConfig& config, const std::string& param_path,
                          const std::vector<double>& values);

nlohmann::ordered_json output_to_json(const RunOutput& out);
std::string output_to_csv_row(const RunOutput& out, std::optional<double> sweep_value);
std::string csv_header(bool with_value);

// Built-in fixture checks (invariant suites); prints one line per check,
// returns the number of failures.
int selftest(std::ostream& os);

} // namespace petermann
