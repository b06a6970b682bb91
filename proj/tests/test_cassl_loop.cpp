#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>

#include "cassl/cassl_loop.hpp"
#include "cassl/io.hpp"

using namespace cassl;

namespace {

TrainConfig desk_config() {
    TrainConfig cfg;
    cfg.n_base = 16;  // small for unit tests; acceptance uses the full desk preset
    cfg.stage.samples_per_stage = 32;
    cfg.stage.eval_trials_per_context = 2;
    return cfg;
}

Curriculum singleton_curriculum(int k) {
    Curriculum cur;
    for (int i = 0; i < k; ++i) {
        cur.stages.push_back({i});
        cur.flat_order.push_back(i);
    }
    return cur;
}

}  // namespace

TEST_CASE("collect_initial records one trial per design row in order") {
    auto env = tabletop_6d();
    SaltelliDesign d(6, 4, true);
    Rng rng(42);
    Dataset data = collect_initial(*env, env->space(), d, rng);
    REQUIRE(data.size() == d.row_count());
    for (std::size_t r = 0; r < data.size(); ++r) {
        CHECK(data[r].trial_id == r);
        CHECK(data[r].stage == 0);
        CHECK(data[r].policy == "qqqqqq");
        CHECK(data[r].action == from_unit(env->space(), d.row(r)));
        CHECK((data[r].outcome == 0.0 || data[r].outcome == 1.0));
    }
}

TEST_CASE("collection sizes match the published and desk budgets") {
    auto env = tabletop_6d();
    Rng rng(1);
    SaltelliDesign paper(6, 140, true);
    CHECK(paper.row_count() == 1960);
    Dataset d = collect_initial(*env, env->space(), paper, rng);
    CHECK(d.size() == 1960);
    SaltelliDesign desk(6, 32, true);
    CHECK(desk.row_count() == 448);
}

TEST_CASE("collect_initial is deterministic for a fixed seed") {
    auto env = tabletop_6d();
    SaltelliDesign d(6, 4, true);
    Rng r1(7), r2(7);
    Dataset a = collect_initial(*env, env->space(), d, r1);
    Dataset b = collect_initial(*env, env->space(), d, r2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].outcome == b[i].outcome);
        CHECK(a[i].context_id == b[i].context_id);
    }
}

TEST_CASE("stage_action classifies dimensions by their stage") {
    auto env = tabletop_6d();
    const auto& space = env->space();
    TrainConfig cfg = desk_config();
    PolicyModel model(space, cfg.learner, 4);
    Curriculum cur = singleton_curriculum(6);
    Rng rng(11);
    const Context& ctx = env->seen_contexts()[0];

    CHECK_THROWS_AS(
        stage_action(model, space, cur, 1, ctx, cfg.stage, rng),
        StateError);  // untrained

    SaltelliDesign d(6, 4, true);
    Dataset d0 = collect_initial(*env, space, d, rng);
    model.fit(d0, {});

    // k = 1: stage-1 dim uncertainty, all later dims exploratory
    for (int trial = 0; trial < 50; ++trial) {
        StageAction sa = stage_action_detailed(model, space, cur, 1, ctx, cfg.stage, rng);
        CHECK(sa.policy[0] == 'u');
        for (std::size_t i = 1; i < 6; ++i) CHECK((sa.policy[i] == 'g' || sa.policy[i] == 'r'));
        CHECK(bin_of(space, sa.action) == sa.bins);
    }
    // k = last: K-1 dims exploited at eps_post, one uncertainty-sampled
    for (int trial = 0; trial < 50; ++trial) {
        StageAction sa = stage_action_detailed(model, space, cur, 6, ctx, cfg.stage, rng);
        CHECK(sa.policy[5] == 'u');
        for (std::size_t i = 0; i < 5; ++i) CHECK((sa.policy[i] == 'g' || sa.policy[i] == 'r'));
    }
    CHECK_THROWS_AS(stage_action(model, space, cur, 0, ctx, cfg.stage, rng), ParameterError);
    CHECK_THROWS_AS(stage_action(model, space, cur, 7, ctx, cfg.stage, rng), ParameterError);
}

TEST_CASE("zero epsilon makes every non-current dimension pure greedy") {
    auto env = tabletop_6d();
    const auto& space = env->space();
    TrainConfig cfg = desk_config();
    cfg.stage.eps_pre = 0.0;
    cfg.stage.eps_post = 0.0;
    PolicyModel model(space, cfg.learner, 4);
    Rng rng(99);
    SaltelliDesign d(6, 8, true);
    model.fit(collect_initial(*env, space, d, rng), {});
    Curriculum cur = singleton_curriculum(6);
    const Context& ctx = env->seen_contexts()[1];
    const BinProbabilities probs = model.predict(ctx);
    for (int trial = 0; trial < 20; ++trial) {
        StageAction sa = stage_action_detailed(model, space, cur, 3, ctx, cfg.stage, rng);
        for (std::size_t i = 0; i < 6; ++i) {
            if (i == 2) continue;  // current stage dim
            CHECK(sa.policy[i] == 'g');
            // the chosen bin attains the maximum probability
            double best = 0.0;
            for (double v : probs.p[i]) best = std::max(best, v);
            CHECK(probs.p[i][static_cast<std::size_t>(sa.bins[i])] == best);
        }
    }
}

TEST_CASE("exploration fractions follow the stage policy epsilons") {
    auto env = tabletop_6d();
    const auto& space = env->space();
    TrainConfig cfg = desk_config();
    cfg.stage.samples_per_stage = 4000;
    PolicyModel model(space, cfg.learner, 4);
    Rng rng(123);
    SaltelliDesign d(6, 8, true);
    model.fit(collect_initial(*env, space, d, rng), {});
    Curriculum cur = singleton_curriculum(6);

    StageResult stage = run_stage(*env, model, space, cur, 3, cfg.stage, rng, 0);
    std::size_t past_r = 0, past_n = 0, future_r = 0, future_n = 0, current_u = 0;
    for (const auto& rec : stage.collected.records()) {
        for (std::size_t i = 0; i < 6; ++i) {
            const int s = cur.stage_of(static_cast<int>(i));
            if (s < 3) {
                past_n++;
                past_r += rec.policy[i] == 'r';
            } else if (s == 3) {
                current_u += rec.policy[i] == 'u';
            } else {
                future_n++;
                future_r += rec.policy[i] == 'r';
            }
        }
    }
    const double past_frac = static_cast<double>(past_r) / static_cast<double>(past_n);
    const double future_frac = static_cast<double>(future_r) / static_cast<double>(future_n);
    CHECK(std::abs(past_frac - 0.15) < 0.02);
    CHECK(std::abs(future_frac - 0.70) < 0.02);
    CHECK(past_frac < future_frac);
    CHECK(current_u == stage.collected.size());  // current dim always uncertainty-tagged
}

TEST_CASE("aggregation weight mass follows the 2.5 rule") {
    auto env = tabletop_6d();
    const auto& space = env->space();
    Rng rng(5);
    SaltelliDesign big(6, 80, true);  // 1120 rows
    Dataset d_prev = collect_initial(*env, space, big, rng);
    while (d_prev.size() > 1000) {
        Dataset trimmed;
        for (std::size_t i = 0; i < 1000; ++i) trimmed.append(d_prev[i]);
        d_prev = std::move(trimmed);
    }
    Dataset d_k;
    for (std::size_t i = 0; i < 400; ++i) {
        TrialRecord r = d_prev[i];
        r.trial_id = 1000 + i;
        d_k.append(r);
    }
    StageConfig cfg;
    PolicyModel model(space, LearnerConfig{}, 4);
    AggregateResult agg = aggregate_and_train(model, d_prev, d_k, cfg);
    REQUIRE(agg.combined.size() == 1400);
    REQUIRE(agg.weights.size() == 1400);
    for (std::size_t i = 0; i < 1000; ++i) CHECK(agg.weights[i] == 1.0);
    for (std::size_t i = 1000; i < 1400; ++i) CHECK(agg.weights[i] == Catch::Approx(6.25));
    double old_mass = 0.0, new_mass = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) old_mass += agg.weights[i];
    for (std::size_t i = 1000; i < 1400; ++i) new_mass += agg.weights[i];
    CHECK(std::abs(new_mass - 2.5 * old_mass) < 1e-9);
}

TEST_CASE("weight 1.0 keeps the plain unweighted union") {
    auto env = tabletop_6d();
    const auto& space = env->space();
    Rng rng(6);
    SaltelliDesign d(6, 4, true);
    Dataset d_prev = collect_initial(*env, space, d, rng);
    Dataset d_k;
    for (std::size_t i = 0; i < 10; ++i) {
        TrialRecord r = d_prev[i];
        r.trial_id = d_prev.size() + i;
        d_k.append(r);
    }
    StageConfig cfg;
    cfg.new_data_weight = 1.0;
    PolicyModel model(space, LearnerConfig{}, 4);
    AggregateResult agg = aggregate_and_train(model, d_prev, d_k, cfg);
    for (double w : agg.weights) CHECK(w == 1.0);

    Dataset empty;
    CHECK_THROWS_AS(aggregate_and_train(model, d_prev, empty, cfg), ParameterError);
}

TEST_CASE("duplicate mode replaces weights with physical copies") {
    ControlSpace space({{"a", 0.0, 1.0, 2}});
    Dataset d_prev, d_k;
    for (std::uint64_t i = 0; i < 10; ++i) {
        TrialRecord r;
        r.trial_id = i;
        r.bins = {0};
        r.action = {0.25};
        r.outcome = 1.0;
        r.policy = "q";
        d_prev.append(r);
        TrialRecord q = r;
        q.trial_id = 10 + i;
        d_k.append(q);
    }
    StageConfig cfg;
    cfg.duplicate_mode = true;  // w_new = 2.5 rounds to 3 copies
    PolicyModel model(space, LearnerConfig{}, 0);
    AggregateResult agg = aggregate_and_train(model, d_prev, d_k, cfg);
    CHECK(agg.combined.size() == 10 + 3 * 10);
    for (double w : agg.weights) CHECK(w == 1.0);
}

TEST_CASE("aggregating a copy of the dataset splits tabular counts 2.5 to 1") {
    ControlSpace space({{"a", 0.0, 1.0, 2}});
    Dataset d_prev;
    for (std::uint64_t i = 0; i < 20; ++i) {
        TrialRecord r;
        r.trial_id = i;
        r.bins = {0};
        r.action = {0.25};
        r.outcome = 1.0;
        r.policy = "q";
        d_prev.append(r);
    }
    Dataset d_k;
    for (std::uint64_t i = 0; i < 20; ++i) {
        TrialRecord r = d_prev[i];
        r.trial_id = 20 + i;
        d_k.append(r);
    }
    PolicyModel model(space, LearnerConfig{}, 0);
    StageConfig cfg;
    aggregate_and_train(model, d_prev, d_k, cfg);
    // old mass 20, new mass 50
    CHECK(model.total_mass(0, 0, 0) == Catch::Approx(70.0));
    CHECK(model.success_mass(0, 0, 0) == Catch::Approx(70.0));
}

TEST_CASE("cassl budget accounting is exact") {
    auto env = tabletop_6d();
    TrainConfig cfg = desk_config();
    cfg.stage.evaluate_stages = false;  // isolate training evaluations
    Rng rng(17);
    TrainResult res = train_cassl(*env, env->space(), cfg, rng);
    const std::size_t expected =
        cfg.n_base * 14 + res.curriculum->stage_count() * cfg.stage.samples_per_stage;
    CHECK(res.report.training_evaluations == expected);
    CHECK(res.dataset.size() == expected);
}

TEST_CASE("train_cassl is deterministic given identical seeds") {
    auto env = tabletop_6d();
    TrainConfig cfg = desk_config();
    Rng r1(31), r2(31);
    TrainResult a = train_cassl(*env, env->space(), cfg, r1);
    TrainResult b = train_cassl(*env, env->space(), cfg, r2);
    CHECK(a.report.eval_novel == b.report.eval_novel);
    CHECK(a.report.collect_rate == b.report.collect_rate);
    REQUIRE(a.dataset.size() == b.dataset.size());
    for (std::size_t i = 0; i < a.dataset.size(); ++i) {
        CHECK(a.dataset[i].bins == b.dataset[i].bins);
        CHECK(a.dataset[i].outcome == b.dataset[i].outcome);
    }
    std::ostringstream ja, jb;
    write_dataset_jsonl(ja, a.dataset);
    write_dataset_jsonl(jb, b.dataset);
    CHECK(ja.str() == jb.str());
}

TEST_CASE("epsilon 1 reduces non-current dimensions to uniform bins") {
    auto env = tabletop_6d();
    const auto& space = env->space();
    TrainConfig cfg = desk_config();
    cfg.stage.eps_pre = 1.0;
    cfg.stage.eps_post = 1.0;
    cfg.stage.samples_per_stage = 3000;
    cfg.curriculum_override = singleton_curriculum(6);
    Rng rng(77);
    TrainResult res = train_cassl(*env, env->space(), cfg, rng);

    // per dimension: bins chosen while the dim was NOT current must be
    // uniform over its bins (chi-square at the 99.9% quantile)
    for (std::size_t i = 0; i < 6; ++i) {
        std::vector<int> counts(static_cast<std::size_t>(space.dim(i).bins), 0);
        std::size_t n = 0;
        for (const auto& rec : res.dataset.records()) {
            if (rec.stage == 0) continue;
            if (rec.policy[i] == 'u') continue;
            ++counts[static_cast<std::size_t>(rec.bins[i])];
            ++n;
        }
        const double expected = static_cast<double>(n) / static_cast<double>(counts.size());
        double chi2 = 0.0;
        for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
        // 99.9% chi-square quantiles: dof 19 -> 43.8, dof 9 -> 27.9, dof 4 -> 18.5, dof 2 -> 13.8
        const std::map<int, double> q{{19, 43.8}, {9, 27.9}, {4, 18.5}, {2, 13.8}};
        CHECK(chi2 < q.at(static_cast<int>(counts.size()) - 1));
    }
}

TEST_CASE("random baseline draws uniform bins and respects the budget") {
    auto env = tabletop_6d();
    TrainConfig cfg = desk_config();
    Rng rng(13);
    TrainResult res = train_random_baseline(*env, env->space(), 1216, cfg, rng);
    CHECK(res.dataset.size() == 1216);
    CHECK(res.report.training_evaluations == 1216);
    CHECK(res.report.method == "random");
    // theta bins roughly uniform
    std::vector<int> counts(20, 0);
    for (const auto& rec : res.dataset.records()) ++counts[static_cast<std::size_t>(rec.bins[0])];
    const double expected = 1216.0 / 20.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 43.8);
}

TEST_CASE("staged baseline uses the proportional paper split") {
    CHECK(staged_budgets(5106) == std::vector<std::size_t>{1960, 2796, 350});
    auto split = staged_budgets(1216);
    CHECK(split.size() == 3);
    CHECK(split[0] + split[1] + split[2] == 1216);
    CHECK(split[0] == 467);
    CHECK(split[1] == 666);
    CHECK(split[2] == 83);

    auto env = tabletop_6d();
    TrainConfig cfg = desk_config();
    Rng rng(14);
    TrainResult res = train_staged_baseline(*env, env->space(), split, cfg, rng);
    CHECK(res.dataset.size() == 1216);
    CHECK(res.report.collect_rate.size() == 3);
    CHECK(res.report.method == "staged");
}

TEST_CASE("the full loop also runs with the logistic learner") {
    auto env = tabletop_6d();
    TrainConfig cfg = desk_config();
    cfg.learner.kind = LearnerKind::Logistic;
    cfg.learner.epochs = 3;
    cfg.stage.epochs = 3;
    cfg.stage.samples_per_stage = 16;
    Rng rng(19);
    TrainResult res = train_cassl(*env, env->space(), cfg, rng);
    CHECK(res.model.kind() == LearnerKind::Logistic);
    CHECK(res.report.eval_novel.size() == res.curriculum->stage_count() + 1);
    Rng rng2(19);
    TrainResult res2 = train_cassl(*env, env->space(), cfg, rng2);
    CHECK(res.report.eval_novel == res2.report.eval_novel);  // deterministic with warm starts
}

TEST_CASE("random curriculum baseline permutes singleton stages") {
    auto env = tabletop_6d();
    TrainConfig cfg = desk_config();
    Rng rng(15), order(99);
    TrainResult res = train_random_curriculum(*env, env->space(), cfg, rng, order);
    CHECK(res.report.method == "random-curriculum");
    REQUIRE(res.curriculum.has_value());
    CHECK(res.curriculum->stage_count() == 6);
    std::vector<int> sorted = res.curriculum->flat_order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5});
}
