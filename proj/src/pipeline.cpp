#include "petermann/pipeline.hpp"

#include "petermann/errors.hpp"
#include "petermann/fixtures.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace petermann {

namespace {

using nlohmann::ordered_json;

ReservoirProfile profile_from_config(const ModeBasis& basis, const ProfileConfig& cfg,
                                     ReservoirKind kind) {
    if (cfg.indicator == "uniform") return uniform_profile(basis, cfg.strength, kind);
    if (cfg.indicator == "interval")
        return interval_profile(basis, (*cfg.interval)[0], (*cfg.interval)[1], cfg.strength, kind);
    ReservoirProfile p;
    p.indicator = Eigen::Map<const Eigen::VectorXd>(cfg.samples->data(),
                                                    static_cast<Eigen::Index>(cfg.samples->size()));
    p.strength = cfg.strength;
    p.kind = kind;
    return p;
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw numeric_error(std::string("output: field ") + name + " is not finite");
}

// Shortest round-trip decimal form, identical to the JSON serialization.
std::string fmt(double v) { return nlohmann::json(v).dump(); }

ordered_json complex_array(const Eigen::VectorXcd& v, bool imag) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(imag ? v[i].imag() : v[i].real());
    return arr;
}

} // namespace

double tune_to_threshold(const ModeBasis& basis, CouplingMatrix& gain, const CouplingMatrix& loss,
                         std::optional<double> target_frequency, int& iterations) {
    double total_scale = 1.0;
    for (int iter = 1; iter <= kThresholdMaxIterations; ++iter) {
        const SystemMatrix sys = assemble(basis, gain, &loss);
        const QuasiModeSet set = eigendecompose(sys);
        const Eigen::Index idx = select_dominant(set, target_frequency);
        const Eigen::VectorXcd c = set.right_vectors.col(idx);

        const double lambda = rate_on_vector(gain, basis.eps, c);
        const double gamma = rate_on_vector(loss, basis.eps, c);
        if (!(gamma > 0.0))
            throw numeric_error("threshold: dominant mode sees no damping; nothing to balance");
        if (!(lambda > 0.0))
            throw numeric_error("threshold: gain rate vanishes on the dominant mode; cannot scale");
        iterations = iter;
        if (std::abs(gamma - lambda) <= kThresholdTol * lambda) return total_scale;

        const double factor = gamma / lambda;
        gain.m *= factor;
        total_scale *= factor;
    }
    throw numeric_error("threshold: fixed-point iteration did not converge within " +
                        std::to_string(kThresholdMaxIterations) + " iterations");
}

Scenario realize(const ScenarioConfig& config) {
    Scenario sc;
    sc.basis = make_box_basis(config.basis.n_modes, config.basis.box_length,
                              config.basis.grid_points, config.basis.omega_offset);
    sc.gain = build_coupling(sc.basis, profile_from_config(sc.basis, config.gain,
                                                           ReservoirKind::gain));
    if (config.loss)
        sc.loss = build_coupling(sc.basis,
                                 profile_from_config(sc.basis, *config.loss, ReservoirKind::loss));

    if (config.threshold) {
        if (!sc.loss) throw config_error("threshold tuning requires a loss profile");
        sc.gain_scale =
            tune_to_threshold(sc.basis, sc.gain, *sc.loss, config.target_frequency,
                              sc.threshold_iterations);
    }
    return sc;
}

namespace {

struct Solved {
    Scenario scenario;
    QuasiModeSet set;
    RunOutput out;
};

Solved solve_internal(const ScenarioConfig& config) {
    Solved s{realize(config), {}, {}};
    const CouplingMatrix* loss = s.scenario.loss ? &*s.scenario.loss : nullptr;
    const SystemMatrix sys = assemble(s.scenario.basis, s.scenario.gain, loss);
    s.set = eigendecompose(sys);

    const Eigen::Index idx = select_dominant(s.set, config.target_frequency);
    s.out.report = analyze(s.set, idx, s.scenario.basis, s.scenario.gain, loss);

    const BiorthogonalityCheck bio = biorthogonality_residual(s.set);
    s.out.biorthogonality = bio.residual;
    s.out.degenerate_spectrum = bio.degenerate;
    s.out.completeness = completeness_residual(s.set);
    const auto [dev_n2, dev_n2_bar] = norm_consistency(s.out.report, s.scenario.basis.grid);
    s.out.norm_dev_N2 = dev_n2;
    s.out.norm_dev_N2_bar = dev_n2_bar;

    s.out.hash = config_hash(config);
    s.out.gain_scale = s.scenario.gain_scale;
    s.out.threshold_iterations = s.scenario.threshold_iterations;
    s.out.dynamics.status = "skipped";
    s.out.dynamics.reason = "dynamics check not requested";
    return s;
}

} // namespace

RunOutput run_solve(const ScenarioConfig& config) { return solve_internal(config).out; }

RunOutput run_validate(const ScenarioConfig& config) {
    Solved s = solve_internal(config);
    RunOutput& out = s.out;
    const QuasiModeReport& report = out.report;
    const CouplingMatrix* loss = s.scenario.loss ? &*s.scenario.loss : nullptr;

    if (config.threshold) {
        const MomentGenerator gen = derive_moment_generator(
            s.scenario.gain, loss, s.scenario.basis.omega, report.Omega);
        const NoiseTrace trace = verify_threshold_diffusion(report, gen);
        out.dynamics.status = trace.passed ? "pass" : "fail";
        out.dynamics.reason = trace.note;
        out.dynamics.slope = trace.slope_fit;
        out.dynamics.expected_slope = 2.0 * report.lambda * report.Omega * report.K;
        out.dynamics.max_rel_deviation = trace.max_rel_deviation;
    } else if (!s.scenario.loss) {
        if (!(report.lambda > 0.0)) {
            out.dynamics.status = "skipped";
            out.dynamics.reason = "amplification rate is zero; noise law not applicable";
            return out;
        }
        const MomentGenerator gen = derive_moment_generator(
            s.scenario.gain, nullptr, s.scenario.basis.omega, report.Omega);
        const NoiseTrace trace = verify_noise_law(report, gen);
        out.dynamics.status = trace.passed ? "pass" : "fail";
        out.dynamics.reason = trace.note;
        out.dynamics.expected_slope = 0.0;
        out.dynamics.max_rel_deviation = trace.max_rel_deviation;
    } else {
        throw config_error(
            "validate: config has loss but threshold=false; no applicable dynamics check");
    }
    return out;
}

nlohmann::ordered_json output_to_json(const RunOutput& out) {
    const QuasiModeReport& r = out.report;
    for (const auto& [value, name] :
         std::initializer_list<std::pair<double, const char*>>{
             {r.Omega, "Omega"},
             {r.lambda, "lambda"},
             {r.gamma, "gamma"},
             {r.E_nu, "E_nu"},
             {r.N2, "N2"},
             {r.N2_bar, "N2_bar"},
             {r.K, "K"},
             {r.K_tilde, "K_tilde"},
             {r.ratio, "ratio"},
             {out.biorthogonality, "biorthogonality"},
             {out.completeness, "completeness"},
             {out.norm_dev_N2, "norm_dev_N2"},
             {out.norm_dev_N2_bar, "norm_dev_N2_bar"},
             {out.gain_scale, "gain_scale"}})
        require_finite(value, name);

    ordered_json j;
    j["provenance"] = {{"config_hash", out.hash}, {"tool_version", kToolVersion}};

    ordered_json rep;
    rep["index"] = r.index;
    rep["eigenvalue_re"] = r.eigenvalue.real();
    rep["eigenvalue_im"] = r.eigenvalue.imag();
    rep["Omega"] = r.Omega;
    rep["lambda"] = r.lambda;
    rep["gamma"] = r.gamma;
    rep["E_nu"] = r.E_nu;
    rep["N2"] = r.N2;
    rep["N2_bar"] = r.N2_bar;
    rep["K"] = r.K;
    rep["K_tilde"] = r.K_tilde;
    rep["ratio"] = r.ratio;
    rep["omega_spread"] = r.omega_spread;
    rep["Omega_amplitude_weighted"] = r.Omega_amplitude_weighted;
    rep["self_overlap_re"] = r.S.real();
    rep["self_overlap_im"] = r.S.imag();
    rep["p"] = std::vector<double>(r.p.data(), r.p.data() + r.p.size());
    rep["c_re"] = complex_array(r.c, false);
    rep["c_im"] = complex_array(r.c, true);
    rep["U_re"] = complex_array(r.U, false);
    rep["U_im"] = complex_array(r.U, true);
    rep["U_bar_re"] = complex_array(r.U_bar, false);
    rep["U_bar_im"] = complex_array(r.U_bar, true);
    j["report"] = std::move(rep);

    j["residuals"] = {{"biorthogonality", out.biorthogonality},
                      {"completeness", out.completeness},
                      {"degenerate_spectrum", out.degenerate_spectrum},
                      {"norm_dev_N2", out.norm_dev_N2},
                      {"norm_dev_N2_bar", out.norm_dev_N2_bar}};
    j["threshold"] = {{"gain_scale", out.gain_scale},
                      {"iterations", out.threshold_iterations}};
    j["dynamics"] = {{"status", out.dynamics.status},
                     {"reason", out.dynamics.reason},
                     {"slope", out.dynamics.slope},
                     {"expected_slope", out.dynamics.expected_slope},
                     {"max_rel_deviation", out.dynamics.max_rel_deviation}};
    return j;
}

std::string csv_header(bool with_value) {
    std::string head = "K,K_tilde,ratio,Omega,lambda,gamma,biorthogonality,completeness,"
                       "norm_dev_N2,norm_dev_N2_bar,config_hash";
    return (with_value ? "value," + head : head) + "\n";
}

std::string output_to_csv_row(const RunOutput& out, std::optional<double> sweep_value) {
    const QuasiModeReport& r = out.report;
    std::ostringstream row;
    if (sweep_value) row << fmt(*sweep_value) << ",";
    row << fmt(r.K) << "," << fmt(r.K_tilde) << "," << fmt(r.ratio) << "," << fmt(r.Omega) << ","
        << fmt(r.lambda) << "," << fmt(r.gamma) << "," << fmt(out.biorthogonality) << ","
        << fmt(out.completeness) << "," << fmt(out.norm_dev_N2) << "," << fmt(out.norm_dev_N2_bar)
        << "," << out.hash << "\n";
    return row.str();
}

std::string run_sweep_csv(const ScenarioConfig& config, const std::string& param_path,
                          const std::vector<double>& values) {
    std::string pointer = "/";
    for (char ch : param_path) pointer += (ch == '.') ? '/' : ch;
    const ordered_json base = config_to_json(config);

    ordered_json probe;
    try {
        probe = base.at(ordered_json::json_pointer(pointer));
    } catch (const nlohmann::json::exception&) {
        throw config_error("sweep: parameter path \"" + param_path + "\" not found in the config");
    }
    if (!probe.is_number())
        throw config_error("sweep: parameter path \"" + param_path + "\" is not a numeric field");
    const bool integer_field = probe.is_number_integer();

    std::string csv = csv_header(/*with_value=*/true);
    for (double value : values) {
        ordered_json patched = base;
        if (integer_field) {
            if (value != std::floor(value))
                throw config_error("sweep: field \"" + param_path + "\" takes integer values; got " +
                                   fmt(value));
            patched[ordered_json::json_pointer(pointer)] = static_cast<long long>(value);
        } else {
            patched[ordered_json::json_pointer(pointer)] = value;
        }
        ScenarioConfig cfg;
        try {
            cfg = parse_config(patched.dump());
        } catch (const config_error& e) {
            throw config_error("sweep: value " + fmt(value) + ": " + e.what());
        }
        csv += output_to_csv_row(run_solve(cfg), value);
    }
    return csv;
}

// ---------------------------------------------------------------------------
// selftest: invariant suites on built-in fixtures
// ---------------------------------------------------------------------------

namespace {

struct SelftestReporter {
    std::ostream& os;
    int failures = 0;

    void check(bool ok, const std::string& name, const std::string& detail) {
        os << (ok ? "[pass] " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    }
};

} // namespace

int selftest(std::ostream& os) {
    SelftestReporter rep{os};

    // K bounds, ratio identity, spectral residuals on seeded random scenarios
    {
        FixtureRng rng(20250810);
        double worst_k = 1e9, worst_gap = 1e9, worst_ratio = 0, worst_bio = 0, worst_comp = 0;
        for (int i = 0; i < 24; ++i) {
            RandomScenario sc = random_scenario(rng, 2, 10, i % 2 == 1);
            const CouplingMatrix* loss = sc.loss ? &*sc.loss : nullptr;
            const QuasiModeSet set = eigendecompose(assemble(sc.basis, sc.gain, loss));
            const Eigen::Index idx = select_dominant(set);
            const QuasiModeReport r = analyze(set, idx, sc.basis, sc.gain, loss);
            worst_k = std::min(worst_k, r.K);
            worst_gap = std::min(worst_gap, r.K_tilde - r.K);
            worst_ratio = std::max(worst_ratio,
                                   std::abs(r.ratio * r.K - r.K_tilde) / r.K_tilde);
            worst_bio = std::max(worst_bio, biorthogonality_residual(set).residual);
            worst_comp = std::max(worst_comp, completeness_residual(set));
        }
        rep.check(worst_k >= 1.0 - 1e-10, "K lower bound", "min K = " + fmt(worst_k));
        rep.check(worst_gap >= -1e-10, "K vs semi-classical K",
                  "min (K_tilde - K) = " + fmt(worst_gap));
        rep.check(worst_ratio <= 1e-10, "ratio identity",
                  "max |ratio*K - K_tilde|/K_tilde = " + fmt(worst_ratio));
        rep.check(worst_bio <= 1e-8, "biorthogonality", "max residual = " + fmt(worst_bio));
        rep.check(worst_comp <= 1e-8, "completeness", "max residual = " + fmt(worst_comp));
    }

    // Uniform gain is diagonal: K = 1 up to quadrature
    {
        const ModeBasis basis = make_box_basis(6, M_PI, 601);
        const CouplingMatrix gain =
            build_coupling(basis, uniform_profile(basis, 1.0, ReservoirKind::gain));
        const QuasiModeSet set = eigendecompose(assemble(basis, gain));
        const QuasiModeReport r = analyze(set, select_dominant(set), basis, gain);
        rep.check(std::abs(r.K - 1.0) < 1e-6, "uniform gain", "K - 1 = " + fmt(r.K - 1.0));
    }

    // Compensated case L = Γ: quasi modes are the universe modes, K = 1
    {
        const ModeBasis basis = make_box_basis(5, M_PI, 501);
        const ReservoirProfile shape =
            interval_profile(basis, 0.4, 2.0, 0.8, ReservoirKind::gain);
        const CouplingMatrix gain = build_coupling(basis, shape);
        ReservoirProfile loss_shape = shape;
        loss_shape.kind = ReservoirKind::loss;
        const CouplingMatrix loss = build_coupling(basis, loss_shape);
        const QuasiModeSet set = eigendecompose(assemble(basis, gain, &loss));
        const QuasiModeReport r = analyze(set, select_dominant(set), basis, gain, &loss);
        rep.check(std::abs(r.K - 1.0) < 1e-10, "compensated L = Gamma",
                  "K - 1 = " + fmt(r.K - 1.0));
    }

    // Gain-only noise law against the RK4 moment oracle
    {
        FixtureRng rng(424242);
        RandomScenario sc = random_scenario(rng, 3, 3, false);
        const QuasiModeSet set = eigendecompose(assemble(sc.basis, sc.gain));
        const QuasiModeReport r = analyze(set, select_dominant(set), sc.basis, sc.gain);
        const MomentGenerator gen =
            derive_moment_generator(sc.gain, nullptr, sc.basis.omega, r.Omega);
        const NoiseTrace trace = verify_noise_law(r, gen);
        rep.check(trace.passed, "gain-only noise law",
                  "max relative deviation = " + fmt(trace.max_rel_deviation));
    }

    // Threshold diffusion slope = 2λ𝓔²K against the moment oracle
    {
        FixtureRng rng(90125);
        RandomScenario sc = random_scenario(rng, 3, 3, true);
        int iters = 0;
        tune_to_threshold(sc.basis, sc.gain, *sc.loss, std::nullopt, iters);
        const CouplingMatrix* loss = &*sc.loss;
        const QuasiModeSet set = eigendecompose(assemble(sc.basis, sc.gain, loss));
        const QuasiModeReport r = analyze(set, select_dominant(set), sc.basis, sc.gain, loss);
        const MomentGenerator gen =
            derive_moment_generator(sc.gain, loss, sc.basis.omega, r.Omega);
        const NoiseTrace trace = verify_threshold_diffusion(r, gen);
        rep.check(trace.passed, "threshold diffusion",
                  "slope deviation = " + fmt(trace.max_rel_deviation) +
                      ", iterations = " + std::to_string(iters));
    }

    os << (rep.failures == 0 ? "selftest: all checks passed\n"
                             : "selftest: " + std::to_string(rep.failures) + " check(s) FAILED\n");
    return rep.failures;
}

} // namespace petermann
