#include "petermann/config.hpp"

#include "petermann/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <set>

namespace petermann {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error("config: " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& known) {
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
}

const json& require_field(const json& j, const std::string& path, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_count(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

BasisConfig parse_basis(const json& j) {
    require_object(j, "basis");
    reject_unknown(j, "basis", {"kind", "n_modes", "box_length", "grid_points", "omega_offset"});

    BasisConfig b;
    const json& kind = require_field(j, "basis", "kind");
    if (!kind.is_string() || kind.get<std::string>() != "box")
        fail("basis.kind", "only \"box\" is supported");
    b.kind = "box";
    b.n_modes = as_count(require_field(j, "basis", "n_modes"), "basis.n_modes");
    if (b.n_modes < 1) fail("basis.n_modes", "must be >= 1");
    b.box_length = as_number(require_field(j, "basis", "box_length"), "basis.box_length");
    if (!(b.box_length > 0.0)) fail("basis.box_length", "must be positive");
    b.grid_points = as_count(require_field(j, "basis", "grid_points"), "basis.grid_points");
    if (b.grid_points < 4 * b.n_modes) fail("basis.grid_points", "must be >= 4*n_modes");
    if (auto it = j.find("omega_offset"); it != j.end()) {
        b.omega_offset = as_number(*it, "basis.omega_offset");
        if (!(b.omega_offset >= 0.0)) fail("basis.omega_offset", "must be >= 0");
    }
    return b;
}

ProfileConfig parse_profile(const json& j, const std::string& path, const BasisConfig& basis) {
    require_object(j, path);
    reject_unknown(j, path, {"indicator", "interval", "samples", "strength"});

    ProfileConfig p;
    const json& ind = require_field(j, path, "indicator");
    if (!ind.is_string()) fail(path + ".indicator", "expected a string");
    p.indicator = ind.get<std::string>();

    if (p.indicator == "uniform") {
        if (j.contains("interval") || j.contains("samples"))
            fail(path + ".indicator", "uniform profile takes no interval/samples");
    } else if (p.indicator == "interval") {
        const json& iv = require_field(j, path, "interval");
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
            fail(path + ".interval", "expected [a, b]");
        const double a = iv[0].get<double>();
        const double b = iv[1].get<double>();
        if (!(a < b)) fail(path + ".indicator", "interval needs a < b");
        if (a < 0.0 || b > basis.box_length)
            fail(path + ".indicator", "interval outside [0, box_length]");
        p.interval = {a, b};
        if (j.contains("samples")) fail(path + ".samples", "interval profile takes no samples");
    } else if (p.indicator == "samples") {
        const json& sm = require_field(j, path, "samples");
        if (!sm.is_array() || sm.empty()) fail(path + ".samples", "expected a non-empty array");
        std::vector<double> vals;
        vals.reserve(sm.size());
        for (const auto& v : sm) {
            if (!v.is_number()) fail(path + ".samples", "expected numbers");
            const double value = v.get<double>();
            if (!(value >= 0.0)) fail(path + ".samples", "indicator values must be >= 0");
            vals.push_back(value);
        }
        if (static_cast<int>(vals.size()) != basis.grid_points)
            fail(path + ".samples", "need exactly grid_points samples");
        p.samples = std::move(vals);
        if (j.contains("interval")) fail(path + ".interval", "samples profile takes no interval");
    } else {
        fail(path + ".indicator", "expected \"uniform\", \"interval\" or \"samples\"");
    }

    p.strength = as_number(require_field(j, path, "strength"), path + ".strength");
    if (!(p.strength >= 0.0) || !std::isfinite(p.strength))
        fail(path + ".strength", "must be finite and >= 0");
    return p;
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: malformed JSON: ") + e.what());
    }
    require_object(doc, "(document)");
    reject_unknown(doc, "", {"basis", "gain", "loss", "threshold", "target_frequency", "seed"});

    ScenarioConfig cfg;
    cfg.basis = parse_basis(require_field(doc, "", "basis"));
    cfg.gain = parse_profile(require_field(doc, "", "gain"), "gain", cfg.basis);
    if (auto it = doc.find("loss"); it != doc.end())
        cfg.loss = parse_profile(*it, "loss", cfg.basis);
    if (auto it = doc.find("threshold"); it != doc.end()) {
        if (!it->is_boolean()) fail("threshold", "expected a boolean");
        cfg.threshold = it->get<bool>();
    }
    if (auto it = doc.find("target_frequency"); it != doc.end())
        cfg.target_frequency = as_number(*it, "target_frequency");
    if (auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_integer()) fail("seed", "expected an integer");
        cfg.seed = it->get<long long>();
    }
    if (cfg.threshold && !cfg.loss) fail("threshold", "threshold tuning requires a loss profile");
    return cfg;
}

namespace {

ordered_json profile_to_json(const ProfileConfig& p) {
    ordered_json j;
    j["indicator"] = p.indicator;
    if (p.interval) j["interval"] = {(*p.interval)[0], (*p.interval)[1]};
    if (p.samples) j["samples"] = *p.samples;
    j["strength"] = p.strength;
    return j;
}

} // namespace

nlohmann::ordered_json config_to_json(const ScenarioConfig& config) {
    ordered_json j;
    j["basis"] = {{"kind", config.basis.kind},
                  {"n_modes", config.basis.n_modes},
                  {"box_length", config.basis.box_length},
                  {"grid_points", config.basis.grid_points},
                  {"omega_offset", config.basis.omega_offset}};
    j["gain"] = profile_to_json(config.gain);
    if (config.loss) j["loss"] = profile_to_json(*config.loss);
    j["threshold"] = config.threshold;
    if (config.target_frequency) j["target_frequency"] = *config.target_frequency;
    if (config.seed) j["seed"] = *config.seed;
    return j;
}

std::string config_hash(const ScenarioConfig& config) {
    const std::string canon = config_to_json(config).dump();
    // FNV-1a, 64 bit: stable across platforms and runs.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char byte : canon) {
        h ^= byte;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace petermann
