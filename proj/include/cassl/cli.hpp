#pragma once

#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cassl/cassl_loop.hpp"
#include "cassl/environments.hpp"
#include "cassl/io.hpp"

namespace cassl {

/// Exit codes of the batch front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// One experiment: environment, sampler, stage and learner settings, seeds.
/// All defaults are the method's reference hyperparameters at desk-scale budgets.
struct ExperimentConfig {
    std::string environment = "tabletop-6d";
    json environment_overrides = json::object();  // synthetic-grasp spec fields
    std::size_t n_base = 32;
    bool second_order = true;
    StageConfig stage;
    LearnerConfig learner;
    std::uint64_t seed = 0;
    std::uint64_t curriculum_seed = 0;  // order seed for the random-curriculum baseline
    std::size_t total_budget = 0;       // 0 = match the CASSL budget
    std::string out_dir = "out";
};

/// Builds the configured environment: a preset name, optionally with
/// synthetic-grasp spec overrides (amps, base, context_scale, pairs, ...).
inline std::unique_ptr<Environment> environment_from_config(const ExperimentConfig& c) {
    if (c.environment_overrides.empty()) return make_environment(c.environment);
    if (c.environment != "tabletop-6d")
        throw ParameterError("config: spec overrides are only defined for the tabletop-6d preset");
    SyntheticGraspSpec spec = tabletop_6d_spec();
    const json& o = c.environment_overrides;
    if (o.contains("amps")) spec.amps = o.at("amps").get<std::vector<double>>();
    if (o.contains("centers")) spec.centers = o.at("centers").get<std::vector<double>>();
    if (o.contains("widths")) spec.widths = o.at("widths").get<std::vector<double>>();
    if (o.contains("base")) spec.base = o.at("base").get<double>();
    if (o.contains("context_scale")) spec.context_scale = o.at("context_scale").get<double>();
    if (o.contains("context_weights"))
        spec.context_weights = o.at("context_weights").get<std::vector<double>>();
    if (o.contains("pairs")) {
        spec.pairs.clear();
        for (const auto& p : o.at("pairs"))
            spec.pairs.push_back({p.at("i").get<int>(), p.at("j").get<int>(),
                                  p.at("gamma").get<double>(), p.at("psi").get<double>()});
    }
    return synthetic_grasp(spec);
}

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["environment"] = c.environment;
    if (!c.environment_overrides.empty()) j["environment_overrides"] = c.environment_overrides;
    j["sampler"] = {{"n_base", c.n_base}, {"second_order", c.second_order}};
    j["stage"] = {{"eps_pre", c.stage.eps_pre},
                  {"eps_post", c.stage.eps_post},
                  {"samples_per_stage", c.stage.samples_per_stage},
                  {"new_data_weight", c.stage.new_data_weight},
                  {"epochs", c.stage.epochs},
                  {"duplicate_mode", c.stage.duplicate_mode},
                  {"warm_start", c.stage.warm_start},
                  {"eval_trials_per_context", c.stage.eval_trials_per_context},
                  {"evaluate_stages", c.stage.evaluate_stages}};
    j["learner"] = {{"kind", c.learner.kind == LearnerKind::Tabular ? "tabular" : "logistic"},
                    {"smoothing", {c.learner.smoothing_alpha, c.learner.smoothing_beta}},
                    {"clusters", c.learner.clusters},
                    {"cluster_features", c.learner.cluster_features},
                    {"epochs", c.learner.epochs},
                    {"learning_rate", c.learner.learning_rate},
                    {"batch_size", c.learner.batch_size}};
    j["seed"] = c.seed;
    j["curriculum_seed"] = c.curriculum_seed;
    j["total_budget"] = c.total_budget;
    j["out_dir"] = c.out_dir;
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("environment")) {
        if (j.at("environment").is_object()) {
            const auto& e = j.at("environment");
            c.environment = e.value("preset", std::string("tabletop-6d"));
            c.environment_overrides = e;
            c.environment_overrides.erase("preset");
        } else {
            c.environment = j.at("environment").get<std::string>();
        }
    }
    if (j.contains("environment_overrides"))
        c.environment_overrides = j.at("environment_overrides");
    if (j.contains("sampler")) {
        const auto& s = j.at("sampler");
        if (s.contains("n_base")) c.n_base = s.at("n_base").get<std::size_t>();
        if (s.contains("second_order")) c.second_order = s.at("second_order").get<bool>();
    }
    if (j.contains("stage")) {
        const auto& s = j.at("stage");
        if (s.contains("eps_pre")) c.stage.eps_pre = s.at("eps_pre").get<double>();
        if (s.contains("eps_post")) c.stage.eps_post = s.at("eps_post").get<double>();
        if (s.contains("samples_per_stage"))
            c.stage.samples_per_stage = s.at("samples_per_stage").get<std::size_t>();
        if (s.contains("new_data_weight"))
            c.stage.new_data_weight = s.at("new_data_weight").get<double>();
        if (s.contains("epochs")) c.stage.epochs = s.at("epochs").get<int>();
        if (s.contains("duplicate_mode")) c.stage.duplicate_mode = s.at("duplicate_mode").get<bool>();
        if (s.contains("warm_start")) c.stage.warm_start = s.at("warm_start").get<bool>();
        if (s.contains("eval_trials_per_context"))
            c.stage.eval_trials_per_context = s.at("eval_trials_per_context").get<int>();
        if (s.contains("evaluate_stages"))
            c.stage.evaluate_stages = s.at("evaluate_stages").get<bool>();
    }
    if (j.contains("learner")) {
        const auto& l = j.at("learner");
        if (l.contains("kind")) {
            const auto kind = l.at("kind").get<std::string>();
            if (kind == "tabular")
                c.learner.kind = LearnerKind::Tabular;
            else if (kind == "logistic")
                c.learner.kind = LearnerKind::Logistic;
            else
                throw ParameterError("config: unknown learner kind '" + kind + "'");
        }
        if (l.contains("smoothing")) {
            c.learner.smoothing_alpha = l.at("smoothing")[0].get<double>();
            c.learner.smoothing_beta = l.at("smoothing")[1].get<double>();
        }
        if (l.contains("clusters")) c.learner.clusters = l.at("clusters").get<int>();
        if (l.contains("cluster_features"))
            c.learner.cluster_features = l.at("cluster_features").get<int>();
        if (l.contains("epochs")) c.learner.epochs = l.at("epochs").get<int>();
        if (l.contains("learning_rate")) c.learner.learning_rate = l.at("learning_rate").get<double>();
        if (l.contains("batch_size")) c.learner.batch_size = l.at("batch_size").get<int>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("curriculum_seed")) c.curriculum_seed = j.at("curriculum_seed").get<std::uint64_t>();
    if (j.contains("total_budget")) c.total_budget = j.at("total_budget").get<std::size_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (!(c.stage.eps_pre >= 0.0 && c.stage.eps_pre <= 1.0) ||
        !(c.stage.eps_post >= 0.0 && c.stage.eps_post <= 1.0))
        throw ParameterError("config: epsilon values must be in [0,1]");
    if (c.n_base < 2) throw ParameterError("config: sampler.n_base must be >= 2");
    if (c.stage.samples_per_stage < 1)
        throw ParameterError("config: stage.samples_per_stage must be >= 1");
    if (!(c.stage.new_data_weight > 0.0))
        throw ParameterError("config: stage.new_data_weight must be > 0");
    return c;
}

inline TrainConfig to_train_config(const ExperimentConfig& c) {
    TrainConfig t;
    t.n_base = c.n_base;
    t.stage = c.stage;
    t.learner = c.learner;
    t.learner.epochs = c.stage.epochs;  // stage epochs govern per-stage refits
    return t;
}

namespace cli_detail {

inline void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw StateError("cannot create output directory '" + dir + "'");
}

inline std::string path_join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

inline std::size_t cassl_budget(const Environment& env, const ExperimentConfig& c) {
    const std::size_t k = env.space().size();
    return c.n_base * (2 * k + 2) + k * c.stage.samples_per_stage;
}

inline void write_run_outputs(const ExperimentConfig& cfg, const TrainResult& res) {
    ensure_out_dir(cfg.out_dir);
    std::ostringstream ds;
    write_dataset_jsonl(ds, res.dataset);
    write_text_file(path_join(cfg.out_dir, "dataset.jsonl"), ds.str());
    write_json_file(path_join(cfg.out_dir, "model.json"), model_to_json(res.model));
    write_json_file(path_join(cfg.out_dir, "run_report.json"),
                    run_report_to_json(res.report, config_to_json(cfg)));
}

}  // namespace cli_detail

/// analyze: saltelli design -> collection -> sensitivity report file
/// (plus the design CSV for external auditing).
inline int cmd_analyze(const ExperimentConfig& cfg, std::ostream& log = std::cerr) {
    try {
        auto env = environment_from_config(cfg);
        const ControlSpace& space = env->space();
        SaltelliDesign design =
            saltelli_design(static_cast<int>(space.size()), cfg.n_base, cfg.second_order);
        Rng rng(cfg.seed);
        Dataset data = collect_initial(*env, space, design, rng);
        SensitivityReport rep = analyze_dataset(space, design, data);

        cli_detail::ensure_out_dir(cfg.out_dir);
        json j = report_to_json(rep, space.names());
        j["config"] = config_to_json(cfg);
        write_json_file(cli_detail::path_join(cfg.out_dir, "sensitivity.json"), j);
        std::ostringstream csv;
        write_design_csv(csv, design, space.names());
        write_text_file(cli_detail::path_join(cfg.out_dir, "design.csv"), csv.str());
        return kExitOk;
    } catch (const ParameterError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

/// rank: sensitivity report file -> curriculum file.
inline int cmd_rank(const std::string& report_path, const std::string& out_dir,
                    std::ostream& log = std::cerr) {
    try {
        json j = read_json_file(report_path);
        SensitivityReport rep = report_from_json(j);
        const auto names = j.at("names").get<std::vector<std::string>>();
        Curriculum cur = build_curriculum(rep);
        cli_detail::ensure_out_dir(out_dir);
        json out = curriculum_to_json(cur, names);
        // per-stage winning energies, recomputed over the shrinking remainder
        std::vector<int> remaining;
        for (std::size_t i = 0; i < names.size(); ++i) remaining.push_back(static_cast<int>(i));
        json energies = json::array();
        for (const auto& stage : cur.stages) {
            energies.push_back(energy(stage, remaining, rep));
            std::vector<int> next;
            for (int d : remaining)
                if (std::find(stage.begin(), stage.end(), d) == stage.end()) next.push_back(d);
            remaining = std::move(next);
        }
        out["stage_energies"] = energies;
        out["config"] = j.value("config", json::object());  // propagate the source echo
        write_json_file(cli_detail::path_join(out_dir, "curriculum.json"), out);
        return kExitOk;
    } catch (const json::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ParameterError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ShapeError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

/// train: the full CASSL pipeline; emits dataset JSONL, model and run report.
inline int cmd_train(const ExperimentConfig& cfg, std::ostream& log = std::cerr) {
    try {
        auto env = environment_from_config(cfg);
        Rng rng(cfg.seed);
        TrainResult res = train_cassl(*env, env->space(), to_train_config(cfg), rng);
        cli_detail::write_run_outputs(cfg, res);
        return kExitOk;
    } catch (const ParameterError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

/// baseline: random | staged | random-curriculum with the same outputs.
inline int cmd_baseline(const ExperimentConfig& cfg, const std::string& kind,
                        std::ostream& log = std::cerr) {
    try {
        auto env = environment_from_config(cfg);
        Rng rng(cfg.seed);
        const std::size_t budget =
            cfg.total_budget > 0 ? cfg.total_budget : cli_detail::cassl_budget(*env, cfg);
        TrainResult res = [&] {
            if (kind == "random")
                return train_random_baseline(*env, env->space(), budget, to_train_config(cfg), rng);
            if (kind == "staged")
                return train_staged_baseline(*env, env->space(), staged_budgets(budget),
                                             to_train_config(cfg), rng);
            if (kind == "random-curriculum") {
                Rng order_rng(Rng::mix(cfg.curriculum_seed + 0x5eedULL));
                return train_random_curriculum(*env, env->space(), to_train_config(cfg), rng,
                                               order_rng);
            }
            throw ParameterError("unknown baseline kind '" + kind +
                                 "' (expected random, staged or random-curriculum)");
        }();
        cli_detail::write_run_outputs(cfg, res);
        return kExitOk;
    } catch (const ParameterError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

/// report: run reports -> comparison table + per-stage accuracy series.
inline int cmd_report(const std::vector<std::string>& report_paths, const std::string& out_dir,
                      std::ostream& log = std::cerr) {
    try {
        if (report_paths.empty()) throw ParameterError("cmd_report: need at least one run report");
        std::vector<RunReport> reports;
        for (const auto& p : report_paths) reports.push_back(run_report_from_json(read_json_file(p)));
        cli_detail::ensure_out_dir(out_dir);

        std::ostringstream cmp;
        cmp.precision(17);
        cmp << "method,final_seen,final_novel,training_evaluations\n";
        for (const auto& r : reports) {
            cmp << r.method << "," << (r.eval_seen.empty() ? 0.0 : r.eval_seen.back()) << ","
                << (r.eval_novel.empty() ? 0.0 : r.eval_novel.back()) << ","
                << r.training_evaluations << "\n";
        }
        write_text_file(cli_detail::path_join(out_dir, "comparison.csv"), cmp.str());

        std::ostringstream st;
        st.precision(17);
        st << "method,stage,collect_rate,eval_seen,eval_novel\n";
        for (const auto& r : reports)
            for (std::size_t k = 0; k < r.collect_rate.size(); ++k) {
                st << r.method << "," << k << "," << r.collect_rate[k] << ","
                   << (k < r.eval_seen.size() ? r.eval_seen[k] : 0.0) << ","
                   << (k < r.eval_novel.size() ? r.eval_novel[k] : 0.0) << "\n";
            }
        write_text_file(cli_detail::path_join(out_dir, "stages.csv"), st.str());
        return kExitOk;
    } catch (const json::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ParameterError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

}  // namespace cassl
