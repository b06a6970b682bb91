#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cassl/control_space.hpp"
#include "cassl/curriculum.hpp"
#include "cassl/dataset.hpp"
#include "cassl/environments.hpp"
#include "cassl/errors.hpp"
#include "cassl/learner.hpp"
#include "cassl/rng.hpp"
#include "cassl/saltelli.hpp"
#include "cassl/sensitivity.hpp"

namespace cassl {

/// Per-stage collection hyperparameters (paper values as defaults).
struct StageConfig {
    double eps_pre = 0.7;
    double eps_post = 0.15;
    std::size_t samples_per_stage = 128;
    double new_data_weight = 2.5;   // 1.0 disables reweighting entirely
    int epochs = 15;
    bool duplicate_mode = false;    // physically duplicate new records instead of weighting
    bool warm_start = true;         // logistic learner keeps weights across stages
    int eval_trials_per_context = 5;
    bool evaluate_stages = true;
};

struct TrainConfig {
    std::size_t n_base = 32;  // Saltelli base count; 32*(2*6+2) = 448 initial trials
    StageConfig stage;
    LearnerConfig learner;
    std::optional<Curriculum> curriculum_override;  // e.g. a random curriculum baseline
};

/// Metrics of one training run: CL0..CLK checkpoints and bookkeeping.
struct RunReport {
    std::string method;
    std::vector<std::vector<std::string>> curriculum_stages;  // by dimension name
    std::vector<std::string> flat_order;
    std::vector<double> collect_rate;  // index 0 = initial collection, then per stage
    std::vector<double> eval_seen;     // CL0..CLK
    std::vector<double> eval_novel;    // CL0..CLK
    std::uint64_t master_seed = 0;
    std::uint64_t training_evaluations = 0;
};

struct TrainResult {
    PolicyModel model;
    Dataset dataset;
    RunReport report;
    std::optional<SensitivityReport> sensitivity;
    std::optional<Curriculum> curriculum;
};

/// Initial quasi-random collection: one trial per design row, in row order,
/// context drawn from the environment's seen pool per trial.
inline Dataset collect_initial(const Environment& env, const ControlSpace& space,
                               const SaltelliDesign& design, Rng& rng) {
    if (static_cast<std::size_t>(design.dimension()) != space.size())
        throw ShapeError("collect_initial: design dimension does not match space");
    Dataset data;
    const auto& pool = env.seen_contexts();
    const std::string tag(space.size(), 'q');
    for (std::size_t r = 0; r < design.row_count(); ++r) {
        const Context& ctx = pool[rng.uniform_int(pool.size())];
        TrialRecord rec;
        rec.trial_id = r;
        rec.stage = 0;
        rec.context_id = ctx.id;
        rec.features = ctx.features;
        rec.action = from_unit(space, design.row(r));
        rec.bins = bin_of(space, rec.action);
        Rng trial_rng = rng.derive(rec.trial_id);
        rec.seed = trial_rng.seed();
        rec.outcome = env.evaluate(ctx, rec.action, trial_rng);
        rec.policy = tag;
        data.append(std::move(rec));
    }
    return data;
}

struct StageAction {
    ActionVector action;
    BinnedAction bins;
    std::string policy;  // one tag per dimension: 'g', 'r' or 'u'
};

/// The three-case stage policy: past-stage dims exploit with eps_post,
/// current-stage dims take the most uncertain bin, future-stage dims explore
/// with eps_pre. Chosen bins map to continuous values via bin centers.
inline StageAction stage_action_detailed(const PolicyModel& model, const ControlSpace& space,
                                         const Curriculum& curriculum, int k, const Context& ctx,
                                         const StageConfig& cfg, Rng& rng) {
    if (k < 1 || static_cast<std::size_t>(k) > curriculum.stage_count())
        throw ParameterError("stage_action: stage index " + std::to_string(k) + " out of range");
    if (!model.trained()) throw StateError("stage_action: model has not been trained");
    const BinProbabilities probs = model.predict(ctx);
    StageAction out;
    out.bins.resize(space.size());
    out.policy.resize(space.size(), '?');
    for (std::size_t i = 0; i < space.size(); ++i) {
        const int s = curriculum.stage_of(static_cast<int>(i));
        if (s < k) {
            auto [bin, tag] = select_eps_greedy_tagged(probs, static_cast<int>(i), cfg.eps_post, rng);
            out.bins[i] = bin;
            out.policy[i] = tag;
        } else if (s == k) {
            out.bins[i] = select_uncertain(probs, static_cast<int>(i), rng);
            out.policy[i] = 'u';
        } else {
            auto [bin, tag] = select_eps_greedy_tagged(probs, static_cast<int>(i), cfg.eps_pre, rng);
            out.bins[i] = bin;
            out.policy[i] = tag;
        }
    }
    out.action = center_of(space, out.bins);
    return out;
}

inline ActionVector stage_action(const PolicyModel& model, const ControlSpace& space,
                                 const Curriculum& curriculum, int k, const Context& ctx,
                                 const StageConfig& cfg, Rng& rng) {
    return stage_action_detailed(model, space, curriculum, k, ctx, cfg, rng).action;
}

struct StageResult {
    Dataset collected;
    double success_rate = 0.0;
};

/// Collects samples_per_stage trials with the stage-k policy.
inline StageResult run_stage(const Environment& env, const PolicyModel& model,
                             const ControlSpace& space, const Curriculum& curriculum, int k,
                             const StageConfig& cfg, Rng& rng, std::uint64_t first_trial_id) {
    StageResult res;
    const auto& pool = env.seen_contexts();
    double successes = 0.0;
    for (std::size_t t = 0; t < cfg.samples_per_stage; ++t) {
        const Context& ctx = pool[rng.uniform_int(pool.size())];
        Rng trial_rng = rng.derive(first_trial_id + t);
        StageAction sa = stage_action_detailed(model, space, curriculum, k, ctx, cfg, trial_rng);
        TrialRecord rec;
        rec.trial_id = first_trial_id + t;
        rec.stage = k;
        rec.context_id = ctx.id;
        rec.features = ctx.features;
        rec.action = std::move(sa.action);
        rec.bins = std::move(sa.bins);
        rec.policy = std::move(sa.policy);
        rec.seed = trial_rng.seed();
        rec.outcome = env.evaluate(ctx, rec.action, trial_rng);
        successes += rec.outcome;
        res.collected.append(std::move(rec));
    }
    res.success_rate = successes / static_cast<double>(cfg.samples_per_stage);
    return res;
}

struct AggregateResult {
    Dataset combined;
    std::vector<double> weights;
};

/// DAgger-style aggregation: D = D_prev plus d_k, with d_k's total weight
/// mass new_data_weight times D_prev's. new_data_weight == 1.0 keeps the
/// plain unweighted union. The model is refit on the weighted union
/// (tabular: from aggregate counts; logistic: warm start unless disabled).
inline AggregateResult aggregate_and_train(PolicyModel& model, const Dataset& d_prev,
                                           const Dataset& d_k, const StageConfig& cfg) {
    if (d_k.empty()) throw ParameterError("aggregate_and_train: new dataset is empty");
    if (!(cfg.new_data_weight > 0.0))
        throw ParameterError("aggregate_and_train: new_data_weight must be positive");
    const double w_new =
        (cfg.new_data_weight == 1.0 || d_prev.empty())
            ? 1.0
            : cfg.new_data_weight * static_cast<double>(d_prev.size()) / static_cast<double>(d_k.size());

    AggregateResult out;
    for (const auto& r : d_prev.records()) out.combined.append(r);
    if (cfg.duplicate_mode) {
        const int copies = std::max(1, static_cast<int>(std::llround(w_new)));
        for (const auto& r : d_k.records())
            for (int c = 0; c < copies; ++c) out.combined.append(r);
        out.weights.assign(out.combined.size(), 1.0);
    } else {
        for (const auto& r : d_k.records()) out.combined.append(r);
        out.weights.assign(d_prev.size(), 1.0);
        out.weights.resize(out.combined.size(), w_new);
    }
    if (model.kind() == LearnerKind::Logistic && !cfg.warm_start) model.reset();
    model.fit(out.combined, out.weights);
    return out;
}

/// Held-out evaluation: pure greedy actions, `trials` attempts per context.
inline double evaluate(const PolicyModel& model, const Environment& env,
                       const std::vector<Context>& contexts, int trials, Rng& rng) {
    if (!model.trained()) throw StateError("evaluate: model has not been trained");
    if (contexts.empty() || trials < 1) throw ParameterError("evaluate: need contexts and trials >= 1");
    const ControlSpace& space = env.space();
    double successes = 0.0;
    for (const auto& ctx : contexts) {
        const BinProbabilities probs = model.predict(ctx);
        for (int t = 0; t < trials; ++t) {
            BinnedAction bins(space.size());
            for (std::size_t i = 0; i < space.size(); ++i)
                bins[i] = select_greedy(probs, static_cast<int>(i), rng);
            successes += env.evaluate(ctx, center_of(space, bins), rng);
        }
    }
    return successes / static_cast<double>(contexts.size() * static_cast<std::size_t>(trials));
}

/// Full CASSL run: quasi-random collection, sensitivity analysis, curriculum,
/// staged collection with aggregation and refits, CL0..CLK checkpoints.
inline TrainResult train_cassl(const Environment& env, const ControlSpace& space,
                               const TrainConfig& cfg, Rng& rng) {
    const int K = static_cast<int>(space.size());
    SaltelliDesign design = saltelli_design(K, cfg.n_base, true);
    Dataset d0 = collect_initial(env, space, design, rng);

    TrainResult res{
        PolicyModel(space, cfg.learner, env.seen_contexts().front().features.size()),
        Dataset{},
        RunReport{},
        std::nullopt,
        std::nullopt,
    };
    res.report.method = "cassl";
    res.report.master_seed = rng.seed();
    res.report.training_evaluations = d0.size();

    SensitivityReport sa = analyze_dataset(space, design, d0);
    Curriculum curriculum = cfg.curriculum_override ? *cfg.curriculum_override : build_curriculum(sa);
    if (cfg.curriculum_override) res.report.method = "cassl-custom-curriculum";
    res.sensitivity = sa;
    res.curriculum = curriculum;
    for (const auto& stage : curriculum.stages) {
        std::vector<std::string> names;
        for (int d : stage) names.push_back(space.dim(static_cast<std::size_t>(d)).name);
        res.report.curriculum_stages.push_back(names);
        for (auto& n : names) res.report.flat_order.push_back(n);
    }

    double init_rate = 0.0;
    for (const auto& r : d0.records()) init_rate += r.outcome;
    res.report.collect_rate.push_back(init_rate / static_cast<double>(d0.size()));

    res.model.fit(d0, {});
    if (cfg.stage.evaluate_stages) {
        res.report.eval_seen.push_back(
            evaluate(res.model, env, env.seen_contexts(), cfg.stage.eval_trials_per_context, rng));
        res.report.eval_novel.push_back(
            evaluate(res.model, env, env.novel_contexts(), cfg.stage.eval_trials_per_context, rng));
    }

    Dataset aggregate = std::move(d0);
    for (int k = 1; k <= static_cast<int>(curriculum.stage_count()); ++k) {
        StageResult stage =
            run_stage(env, res.model, space, curriculum, k, cfg.stage, rng, aggregate.size());
        res.report.training_evaluations += stage.collected.size();
        res.report.collect_rate.push_back(stage.success_rate);
        AggregateResult agg = aggregate_and_train(res.model, aggregate, stage.collected, cfg.stage);
        aggregate = std::move(agg.combined);
        if (cfg.stage.evaluate_stages) {
            res.report.eval_seen.push_back(
                evaluate(res.model, env, env.seen_contexts(), cfg.stage.eval_trials_per_context, rng));
            res.report.eval_novel.push_back(
                evaluate(res.model, env, env.novel_contexts(), cfg.stage.eval_trials_per_context, rng));
        }
    }
    res.dataset = std::move(aggregate);
    return res;
}

/// Uniform-random exploration for the full budget, one fit at the end.
inline TrainResult train_random_baseline(const Environment& env, const ControlSpace& space,
                                         std::size_t total_budget, const TrainConfig& cfg, Rng& rng) {
    if (total_budget < 1) throw ParameterError("train_random_baseline: budget must be >= 1");
    TrainResult res{
        PolicyModel(space, cfg.learner, env.seen_contexts().front().features.size()),
        Dataset{},
        RunReport{},
        std::nullopt,
        std::nullopt,
    };
    res.report.method = "random";
    res.report.master_seed = rng.seed();
    const auto& pool = env.seen_contexts();
    const std::string tag(space.size(), 'r');
    double successes = 0.0;
    for (std::size_t t = 0; t < total_budget; ++t) {
        const Context& ctx = pool[rng.uniform_int(pool.size())];
        TrialRecord rec;
        rec.trial_id = t;
        rec.stage = 0;
        rec.context_id = ctx.id;
        rec.features = ctx.features;
        rec.action.resize(space.size());
        for (std::size_t i = 0; i < space.size(); ++i)
            rec.action[i] = rng.uniform(space.dim(i).min, space.dim(i).max);
        rec.bins = bin_of(space, rec.action);
        Rng trial_rng = rng.derive(rec.trial_id);
        rec.seed = trial_rng.seed();
        rec.outcome = env.evaluate(ctx, rec.action, trial_rng);
        successes += rec.outcome;
        rec.policy = tag;
        res.dataset.append(std::move(rec));
    }
    res.report.training_evaluations = res.dataset.size();
    res.report.collect_rate.push_back(successes / static_cast<double>(total_budget));
    res.model.fit(res.dataset, {});
    if (cfg.stage.evaluate_stages) {
        res.report.eval_seen.push_back(
            evaluate(res.model, env, env.seen_contexts(), cfg.stage.eval_trials_per_context, rng));
        res.report.eval_novel.push_back(
            evaluate(res.model, env, env.novel_contexts(), cfg.stage.eval_trials_per_context, rng));
    }
    return res;
}

/// Paper split 1960/2796/350 scaled proportionally (largest remainder).
inline std::vector<std::size_t> staged_budgets(std::size_t total) {
    const double shares[3] = {1960.0, 2796.0, 350.0};
    const double sum = shares[0] + shares[1] + shares[2];
    std::vector<std::size_t> out(3);
    double frac[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = static_cast<double>(total) * shares[i] / sum;
        out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(exact);
        frac[i] = exact - static_cast<double>(out[static_cast<std::size_t>(i)]);
        assigned += out[static_cast<std::size_t>(i)];
    }
    while (assigned < total) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (frac[i] > frac[best]) best = i;
        ++out[static_cast<std::size_t>(best)];
        frac[best] = -1.0;
        ++assigned;
    }
    return out;
}

/// Staged learning: quasi-random stage 0, then eps_post-greedy collection
/// over all dimensions with the latest model, aggregate, refit.
inline TrainResult train_staged_baseline(const Environment& env, const ControlSpace& space,
                                         const std::vector<std::size_t>& budgets,
                                         const TrainConfig& cfg, Rng& rng) {
    if (budgets.empty() || budgets[0] < 1)
        throw ParameterError("train_staged_baseline: need a positive stage-0 budget");
    TrainResult res{
        PolicyModel(space, cfg.learner, env.seen_contexts().front().features.size()),
        Dataset{},
        RunReport{},
        std::nullopt,
        std::nullopt,
    };
    res.report.method = "staged";
    res.report.master_seed = rng.seed();
    const auto& pool = env.seen_contexts();

    auto pts = sobol_points(static_cast<int>(space.size()), budgets[0]);
    const std::string qtag(space.size(), 'q');
    double successes = 0.0;
    for (std::size_t t = 0; t < budgets[0]; ++t) {
        const Context& ctx = pool[rng.uniform_int(pool.size())];
        TrialRecord rec;
        rec.trial_id = t;
        rec.stage = 0;
        rec.context_id = ctx.id;
        rec.features = ctx.features;
        rec.action = from_unit(space, pts[t]);
        rec.bins = bin_of(space, rec.action);
        Rng trial_rng = rng.derive(rec.trial_id);
        rec.seed = trial_rng.seed();
        rec.outcome = env.evaluate(ctx, rec.action, trial_rng);
        successes += rec.outcome;
        rec.policy = qtag;
        res.dataset.append(std::move(rec));
    }
    res.report.collect_rate.push_back(successes / static_cast<double>(budgets[0]));
    res.model.fit(res.dataset, {});
    if (cfg.stage.evaluate_stages) {
        res.report.eval_seen.push_back(
            evaluate(res.model, env, env.seen_contexts(), cfg.stage.eval_trials_per_context, rng));
        res.report.eval_novel.push_back(
            evaluate(res.model, env, env.novel_contexts(), cfg.stage.eval_trials_per_context, rng));
    }

    for (std::size_t s = 1; s < budgets.size(); ++s) {
        Dataset d_k;
        double st_success = 0.0;
        for (std::size_t t = 0; t < budgets[s]; ++t) {
            const Context& ctx = pool[rng.uniform_int(pool.size())];
            const std::uint64_t trial_id = res.dataset.size() + d_k.size();
            Rng trial_rng = rng.derive(trial_id);
            const BinProbabilities probs = res.model.predict(ctx);
            TrialRecord rec;
            rec.trial_id = trial_id;
            rec.stage = static_cast<int>(s);
            rec.context_id = ctx.id;
            rec.features = ctx.features;
            rec.bins.resize(space.size());
            rec.policy.resize(space.size(), '?');
            for (std::size_t i = 0; i < space.size(); ++i) {
                auto [bin, tag] =
                    select_eps_greedy_tagged(probs, static_cast<int>(i), cfg.stage.eps_post, trial_rng);
                rec.bins[i] = bin;
                rec.policy[i] = tag;
            }
            rec.action = center_of(space, rec.bins);
            rec.seed = trial_rng.seed();
            rec.outcome = env.evaluate(ctx, rec.action, trial_rng);
            st_success += rec.outcome;
            d_k.append(std::move(rec));
        }
        res.report.collect_rate.push_back(st_success / static_cast<double>(budgets[s]));
        AggregateResult agg = aggregate_and_train(res.model, res.dataset, d_k, cfg.stage);
        res.dataset = std::move(agg.combined);
        if (cfg.stage.evaluate_stages) {
            res.report.eval_seen.push_back(
                evaluate(res.model, env, env.seen_contexts(), cfg.stage.eval_trials_per_context, rng));
            res.report.eval_novel.push_back(
                evaluate(res.model, env, env.novel_contexts(), cfg.stage.eval_trials_per_context, rng));
        }
    }
    res.report.training_evaluations = res.dataset.size();
    return res;
}

/// CASSL with a uniformly random singleton-stage curriculum.
inline TrainResult train_random_curriculum(const Environment& env, const ControlSpace& space,
                                           const TrainConfig& cfg, Rng& rng, Rng& order_rng) {
    std::vector<int> perm(space.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[order_rng.uniform_int(i)]);
    Curriculum cur;
    for (int d : perm) {
        cur.stages.push_back({d});
        cur.flat_order.push_back(d);
    }
    TrainConfig c = cfg;
    c.curriculum_override = cur;
    TrainResult res = train_cassl(env, space, c, rng);
    res.report.method = "random-curriculum";
    return res;
}

}  // namespace cassl
