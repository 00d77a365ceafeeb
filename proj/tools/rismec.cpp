// Command-line driver: validate scenarios, run single episodes, and run
// parameter sweeps. Outputs comma-separated metric tables plus a manifest
// echoing the fully resolved configuration.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rismec/controller.hpp"
#include "rismec/report.hpp"
#include "rismec/scenario.hpp"
#include "rismec/sweep.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int window = 100;
    std::string csi_snr; // "", "inf", or a linear value
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario document (JSON)")
        ->required();
    auto* out = cmd->add_option("--out", args.out_dir, "Output directory");
    if (needs_out) out->required();
    cmd->add_option("--seed", args.seed, "Override the scenario rng_seed");
    cmd->add_option("--window", args.window, "Moving-average window in slots")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--csi-snr", args.csi_snr,
                    "CSI estimation SNR (linear) or 'inf' for perfect CSI");
}

rismec::ScenarioConfig load_with_overrides(const CommonArgs& args) {
    std::ifstream in(args.scenario_path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + args.scenario_path);
    rismec::ScenarioConfig cfg = rismec::load_scenario(in);
    if (args.seed) cfg.rng_seed = *args.seed;
    if (!args.csi_snr.empty()) {
        if (args.csi_snr == "inf") {
            cfg.events.csi_snr.reset();
        } else {
            const double eta = std::stod(args.csi_snr);
            if (!(eta > 0.0)) throw std::runtime_error("--csi-snr must be > 0 or 'inf'");
            cfg.events.csi_snr = eta;
        }
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json base_manifest(const std::string& command, const CommonArgs& args,
                             const rismec::ScenarioConfig& cfg) {
    nlohmann::json j;
    j["command"] = command;
    j["scenario"] = args.scenario_path;
    j["window"] = args.window;
    if (args.seed)
        j["seed_override"] = *args.seed;
    else
        j["seed_override"] = nullptr;
    j["csi_snr_override"] = args.csi_snr.empty() ? nlohmann::json(nullptr)
                                                 : nlohmann::json(args.csi_snr);
    j["resolved_scenario"] = rismec::scenario_to_json(cfg);
    return j;
}

rismec::SweepSpec parse_sweep(const std::string& text, int seeds_per_point) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw std::runtime_error("--sweep expects <name>=<comma-separated values>");
    rismec::SweepSpec spec;
    spec.parameter = text.substr(0, eq);
    spec.seeds_per_point = seeds_per_point;
    std::stringstream values(text.substr(eq + 1));
    std::string item;
    while (std::getline(values, item, ',')) {
        if (item.empty()) continue;
        spec.values.push_back(std::stod(item));
    }
    rismec::validate_sweep(spec);
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted edge-computing simulator"};
    app.require_subcommand(1);

    CommonArgs validate_args, episode_args, sweep_args;
    std::string sweep_expr;
    int seeds_per_point = 1;

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario document");
    add_common(validate, validate_args, /*needs_out=*/false);

    CLI::App* episode = app.add_subcommand("episode", "Run one episode, emit per-slot metrics");
    add_common(episode, episode_args, /*needs_out=*/true);

    CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep, emit per-point averages");
    add_common(sweep, sweep_args, /*needs_out=*/true);
    sweep->add_option("--sweep", sweep_expr, "Sweep expression, e.g. v_param=1e7,1e8,1e9")
        ->required();
    sweep->add_option("--seeds-per-point", seeds_per_point, "Seeds averaged per sweep point")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const auto cfg = load_with_overrides(validate_args);
            std::cout << "ok: " << cfg.num_users() << " users, " << cfg.num_riss()
                      << " RISs, horizon " << cfg.horizon << "\n";
            return 0;
        }
        if (episode->parsed()) {
            const auto cfg = load_with_overrides(episode_args);
            fs::create_directories(episode_args.out_dir);
            const auto result =
                rismec::run_episode(cfg, rismec::default_channel_provider(),
                                    episode_args.window);
            write_file(fs::path(episode_args.out_dir) / "episode.csv",
                       rismec::episode_table(cfg, result));
            write_file(fs::path(episode_args.out_dir) / "run_manifest.json",
                       base_manifest("episode", episode_args, cfg).dump(2) + "\n");
            std::cout << "wrote " << (fs::path(episode_args.out_dir) / "episode.csv").string()
                      << "\n";
            return 0;
        }
        if (sweep->parsed()) {
            const auto cfg = load_with_overrides(sweep_args);
            const auto spec = parse_sweep(sweep_expr, seeds_per_point);
            fs::create_directories(sweep_args.out_dir);
            const auto rows = rismec::run_sweep(cfg, spec, sweep_args.window);
            write_file(fs::path(sweep_args.out_dir) / "sweep.csv", rismec::sweep_table(rows));
            auto manifest = base_manifest("sweep", sweep_args, cfg);
            manifest["sweep"] = {{"parameter", spec.parameter},
                                 {"values", spec.values},
                                 {"seeds_per_point", spec.seeds_per_point}};
            write_file(fs::path(sweep_args.out_dir) / "run_manifest.json",
                       manifest.dump(2) + "\n");
            std::cout << "wrote " << (fs::path(sweep_args.out_dir) / "sweep.csv").string()
                      << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
