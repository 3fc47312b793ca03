// petermann — excess-noise factor solver for multimode amplifier/laser models.
//
// Verbs:
//   solve     full pipeline for one config, JSON (or single-row CSV) output
//   sweep     repeat solve over values of one numeric config field, CSV output
//   validate  solve plus the applicable moment-oracle dynamics check
//   selftest  invariant suites on built-in fixtures

#include "petermann/errors.hpp"
#include "petermann/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;
constexpr int kExitValidationFailed = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw petermann::config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw petermann::config_error("cannot open output file: " + out_path);
    out << text;
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw petermann::config_error("sweep: cannot parse value \"" + item + "\"");
        }
        if (used != item.size())
            throw petermann::config_error("sweep: cannot parse value \"" + item + "\"");
        values.push_back(v);
    }
    return values;
}

std::string render(const petermann::RunOutput& out, const std::string& format) {
    if (format == "csv")
        return petermann::csv_header(false) + petermann::output_to_csv_row(out, std::nullopt);
    return petermann::output_to_json(out).dump(2) + "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"excess-noise factor solver for multimode amplifier/laser models"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::string param_path;
    std::string values_list;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", config_path, "path to the JSON scenario config")
                ->required();
        cmd->add_option("--out", out_path, "output file (default: stdout)");
    };

    CLI::App* solve = app.add_subcommand("solve", "run the full pipeline for one config");
    add_common(solve, true);
    solve->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

    CLI::App* sweep = app.add_subcommand("sweep", "solve over values of one numeric config field");
    add_common(sweep, true);
    sweep->add_option("--param", param_path, "dot-separated config field, e.g. gain.strength")
        ->required();
    sweep->add_option("--values", values_list, "comma-separated values")->required();

    CLI::App* validate =
        app.add_subcommand("validate", "solve plus the applicable dynamics verification");
    add_common(validate, true);
    validate->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

    CLI::App* self = app.add_subcommand("selftest", "run invariant suites on built-in fixtures");
    add_common(self, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            const auto cfg = petermann::parse_config(read_file(config_path));
            write_output(render(petermann::run_solve(cfg), format), out_path);
        } else if (sweep->parsed()) {
            const auto cfg = petermann::parse_config(read_file(config_path));
            write_output(petermann::run_sweep_csv(cfg, param_path, parse_values(values_list)),
                         out_path);
        } else if (validate->parsed()) {
            const auto cfg = petermann::parse_config(read_file(config_path));
            const petermann::RunOutput out = petermann::run_validate(cfg);
            write_output(render(out, format), out_path);
            if (out.dynamics.status == "fail") {
                std::cerr << "validate: dynamics check failed: " << out.dynamics.reason << "\n";
                return kExitValidationFailed;
            }
        } else if (self->parsed()) {
            std::ostringstream report;
            const int failures = petermann::selftest(report);
            write_output(report.str(), out_path);
            if (failures > 0) return kExitValidationFailed;
        }
    } catch (const petermann::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const petermann::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
