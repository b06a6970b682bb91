#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cassl/cassl_loop.hpp"
#include "cassl/control_space.hpp"
#include "cassl/curriculum.hpp"
#include "cassl/dataset.hpp"
#include "cassl/errors.hpp"
#include "cassl/learner.hpp"
#include "cassl/sensitivity.hpp"

namespace cassl {

inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

// ---- control space ----------------------------------------------------

inline json space_to_json(const ControlSpace& space) {
    json dims = json::array();
    for (const auto& d : space.dims())
        dims.push_back({{"name", d.name}, {"min", d.min}, {"max", d.max}, {"bins", d.bins}});
    return {{"dims", dims}};
}

inline ControlSpace space_from_json(const json& j) {
    std::vector<ControlDim> dims;
    for (const auto& d : j.at("dims"))
        dims.push_back({d.at("name").get<std::string>(), d.at("min").get<double>(),
                        d.at("max").get<double>(), d.at("bins").get<int>()});
    return ControlSpace(std::move(dims));
}

// ---- sensitivity report ------------------------------------------------

inline json report_to_json(const SensitivityReport& rep, const std::vector<std::string>& names) {
    if (names.size() != rep.dimension())
        throw ShapeError("report_to_json: name count does not match report dimension");
    json j;
    j["schema_version"] = kSchemaVersion;
    j["names"] = names;
    j["s1"] = rep.s1;
    j["st"] = rep.st;
    j["s2"] = rep.s2;
    j["var_y"] = rep.var_y;
    j["n_base"] = rep.n_base;
    return j;
}

inline SensitivityReport report_from_json(const json& j) {
    SensitivityReport rep;
    rep.s1 = j.at("s1").get<std::vector<double>>();
    rep.st = j.at("st").get<std::vector<double>>();
    rep.s2 = j.at("s2").get<std::vector<std::vector<double>>>();
    rep.var_y = j.at("var_y").get<double>();
    rep.n_base = j.at("n_base").get<std::size_t>();
    if (rep.st.size() != rep.s1.size())
        throw ShapeError("report_from_json: s1/st length mismatch");
    if (!(rep.var_y > 0.0))
        throw ParameterError("report_from_json: var_y must be positive; the report is meaningless");
    return rep;
}

// ---- curriculum ---------------------------------------------------------

inline json curriculum_to_json(const Curriculum& cur, const std::vector<std::string>& names) {
    json stages = json::array();
    for (const auto& st : cur.stages) {
        json stage = json::array();
        for (int d : st) stage.push_back(names.at(static_cast<std::size_t>(d)));
        stages.push_back(stage);
    }
    json flat = json::array();
    for (int d : cur.flat_order) flat.push_back(names.at(static_cast<std::size_t>(d)));
    return {{"schema_version", kSchemaVersion}, {"stages", stages}, {"flat_order", flat}};
}

inline Curriculum curriculum_from_json(const json& j, const std::vector<std::string>& names) {
    auto index_of = [&](const std::string& n) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<int>(i);
        throw ParameterError("curriculum_from_json: unknown dimension name '" + n + "'");
    };
    Curriculum cur;
    for (const auto& stage : j.at("stages")) {
        std::vector<int> s;
        for (const auto& n : stage) s.push_back(index_of(n.get<std::string>()));
        cur.stages.push_back(std::move(s));
    }
    for (const auto& n : j.at("flat_order")) cur.flat_order.push_back(index_of(n.get<std::string>()));
    return cur;
}

// ---- policy model --------------------------------------------------------

inline json model_to_json(const PolicyModel& model) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = model.kind() == LearnerKind::Tabular ? "tabular" : "logistic";
    j["feature_length"] = model.feature_length();
    j["bins"] = model.bins();
    const auto& cfg = model.config();
    j["smoothing"] = {cfg.smoothing_alpha, cfg.smoothing_beta};
    j["clusters"] = cfg.clusters;
    j["cluster_features"] = cfg.cluster_features;
    j["epochs"] = cfg.epochs;
    j["learning_rate"] = cfg.learning_rate;
    j["batch_size"] = cfg.batch_size;
    j["fit_seed"] = cfg.fit_seed;
    j["trained"] = model.trained();
    if (model.kind() == LearnerKind::Tabular) {
        j["success"] = model.success_counts();
        j["total"] = model.total_counts();
    } else {
        j["weights"] = model.weights();
    }
    return j;
}

inline PolicyModel model_from_json(const json& j, const ControlSpace& space) {
    LearnerConfig cfg;
    cfg.kind = j.at("kind").get<std::string>() == "tabular" ? LearnerKind::Tabular
                                                            : LearnerKind::Logistic;
    cfg.smoothing_alpha = j.at("smoothing")[0].get<double>();
    cfg.smoothing_beta = j.at("smoothing")[1].get<double>();
    cfg.clusters = j.at("clusters").get<int>();
    cfg.cluster_features = j.at("cluster_features").get<int>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.fit_seed = j.at("fit_seed").get<std::uint64_t>();
    PolicyModel model(space, cfg, j.at("feature_length").get<std::size_t>());
    if (j.at("bins").get<std::vector<int>>() != model.bins())
        throw ShapeError("model_from_json: bin layout does not match the control space");
    if (cfg.kind == LearnerKind::Tabular) {
        model.set_counts(j.at("success").get<std::vector<std::vector<std::vector<double>>>>(),
                         j.at("total").get<std::vector<std::vector<std::vector<double>>>>());
    } else {
        model.set_weights(j.at("weights").get<std::vector<std::vector<std::vector<double>>>>());
    }
    if (j.at("trained").get<bool>()) model.mark_trained();
    return model;
}

// ---- dataset (JSONL) ------------------------------------------------------

inline json record_to_json(const TrialRecord& r) {
    return {{"trial_id", r.trial_id}, {"stage", r.stage},     {"context_id", r.context_id},
            {"features", r.features}, {"action", r.action},   {"bins", r.bins},
            {"outcome", r.outcome},   {"policy", r.policy},   {"seed", r.seed}};
}

inline TrialRecord record_from_json(const json& j) {
    TrialRecord r;
    r.trial_id = j.at("trial_id").get<std::uint64_t>();
    r.stage = j.at("stage").get<int>();
    r.context_id = j.at("context_id").get<std::string>();
    r.features = j.at("features").get<std::vector<double>>();
    r.action = j.at("action").get<std::vector<double>>();
    r.bins = j.at("bins").get<std::vector<int>>();
    r.outcome = j.at("outcome").get<double>();
    r.policy = j.at("policy").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

inline void write_dataset_jsonl(std::ostream& os, const Dataset& data) {
    for (const auto& r : data.records()) os << record_to_json(r).dump() << "\n";
}

inline Dataset read_dataset_jsonl(std::istream& is) {
    Dataset data;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        data.append(record_from_json(json::parse(line)));
    }
    return data;
}

// ---- run report -----------------------------------------------------------

inline json run_report_to_json(const RunReport& rep, const json& config_echo) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["method"] = rep.method;
    j["curriculum_stages"] = rep.curriculum_stages;
    j["flat_order"] = rep.flat_order;
    j["collect_rate"] = rep.collect_rate;
    j["eval_seen"] = rep.eval_seen;
    j["eval_novel"] = rep.eval_novel;
    j["master_seed"] = rep.master_seed;
    j["training_evaluations"] = rep.training_evaluations;
    j["config"] = config_echo;
    return j;
}

inline RunReport run_report_from_json(const json& j) {
    RunReport rep;
    rep.method = j.at("method").get<std::string>();
    rep.curriculum_stages = j.at("curriculum_stages").get<std::vector<std::vector<std::string>>>();
    rep.flat_order = j.at("flat_order").get<std::vector<std::string>>();
    rep.collect_rate = j.at("collect_rate").get<std::vector<double>>();
    rep.eval_seen = j.at("eval_seen").get<std::vector<double>>();
    rep.eval_novel = j.at("eval_novel").get<std::vector<double>>();
    rep.master_seed = j.at("master_seed").get<std::uint64_t>();
    rep.training_evaluations = j.at("training_evaluations").get<std::uint64_t>();
    return rep;
}

// ---- file helpers ------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw StateError("cannot open '" + path + "' for writing");
    os << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw StateError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline json read_json_file(const std::string& path) { return json::parse(read_text_file(path)); }

inline void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(1) + "\n");
}

}  // namespace cassl
