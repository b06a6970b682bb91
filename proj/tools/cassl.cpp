#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cassl/cli.hpp"

namespace {

cassl::ExperimentConfig load_config(const std::string& config_path, const std::string& preset,
                                    bool seed_set, std::uint64_t seed, const std::string& out_dir) {
    cassl::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = cassl::config_from_json(cassl::read_json_file(config_path));
    if (!preset.empty()) cfg.environment = preset;
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CASSL: sensitivity-driven curriculum training over discretized control spaces"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, report_path, baseline_kind;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> report_files;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file (JSON)");
        cmd->add_option("--preset", preset, "environment preset name");
        cmd->add_option("--seed", seed, "master seed")->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* analyze = app.add_subcommand("analyze", "collect a quasi-random dataset and estimate Sobol indices");
    add_common(analyze);
    auto* rank = app.add_subcommand("rank", "build a curriculum from a sensitivity report file");
    rank->add_option("report", report_path, "sensitivity report JSON")->required();
    rank->add_option("--out", out_dir, "output directory");
    auto* train = app.add_subcommand("train", "run the full CASSL training loop");
    add_common(train);
    auto* baseline = app.add_subcommand("baseline", "run a baseline with the same outputs");
    baseline->add_option("kind", baseline_kind, "random | staged | random-curriculum")->required();
    add_common(baseline);
    auto* report = app.add_subcommand("report", "aggregate run reports into plot-ready CSVs");
    report->add_option("reports", report_files, "run_report.json files")->required();
    report->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed())
            return cassl::cmd_analyze(load_config(config_path, preset, seed_set, seed, out_dir));
        if (rank->parsed())
            return cassl::cmd_rank(report_path, out_dir.empty() ? "out" : out_dir);
        if (train->parsed())
            return cassl::cmd_train(load_config(config_path, preset, seed_set, seed, out_dir));
        if (baseline->parsed())
            return cassl::cmd_baseline(load_config(config_path, preset, seed_set, seed, out_dir),
                                       baseline_kind);
        if (report->parsed())
            return cassl::cmd_report(report_files, out_dir.empty() ? "out" : out_dir);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cassl::kExitConfigError;
    } catch (const cassl::ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cassl::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cassl::kExitRuntimeError;
    }
    return cassl::kExitConfigError;
}
