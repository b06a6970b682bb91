#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "cassl/environments.hpp"
#include "cassl/saltelli.hpp"
#include "cassl/sensitivity.hpp"
#include "cassl/dataset.hpp"

using namespace cassl;

TEST_CASE("ishigami values at known points") {
    auto env = ishigami(7.0, 0.1);
    Rng rng(1);
    const Context& ctx = env->seen_contexts()[0];
    CHECK(env->evaluate(ctx, {0.0, 0.0, 0.0}, rng) == Catch::Approx(0.0).margin(1e-15));
    CHECK(env->evaluate(ctx, {M_PI / 2.0, 0.0, 0.0}, rng) == Catch::Approx(1.0));
}

TEST_CASE("deterministic benchmarks ignore the rng") {
    auto env = ishigami();
    Rng r1(1), r2(999);
    const Context& ctx = env->seen_contexts()[0];
    for (int i = 0; i < 20; ++i) {
        ActionVector a{-1.0 + i * 0.1, 0.5, 2.0};
        CHECK(env->evaluate(ctx, a, r1) == env->evaluate(ctx, a, r2));
    }
}

TEST_CASE("g-function tends to the constant 1 as coefficients grow; analyze rejects the limit") {
    auto env = g_function({1e12, 1e12});
    SaltelliDesign d(2, 16, true);
    Rng rng(2);
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        const double f =
            env->evaluate(env->seen_contexts()[0], from_unit(env->space(), d.row(r)), rng);
        CHECK(std::abs(f - 1.0) < 1e-11);
    }
    std::vector<double> limit(d.row_count(), 1.0);
    CHECK_THROWS_AS(analyze(d, limit), DegenerateVarianceError);
}

TEST_CASE("g-function ranks the a=0 dimension first") {
    auto env = g_function({0.0, 9.0, 99.0});
    SaltelliDesign d(3, 1 << 10, true);
    Rng rng(3);
    std::vector<double> y;
    for (std::size_t r = 0; r < d.row_count(); ++r)
        y.push_back(env->evaluate(env->seen_contexts()[0], from_unit(env->space(), d.row(r)), rng));
    SensitivityReport rep = analyze(d, y);
    CHECK(rep.s1[0] > rep.s1[1]);
    CHECK(rep.s1[1] > rep.s1[2]);
}

TEST_CASE("all-zero coefficients give success probability exactly one half") {
    SyntheticGraspSpec spec;
    spec.amps.assign(6, 0.0);
    spec.centers.assign(6, 0.5);
    spec.widths.assign(6, 0.2);
    spec.base = 0.0;
    spec.context_scale = 0.0;
    spec.context_weights.assign(4, 0.0);
    spec.seen = {Context{"s0", {0.0, 0.0, 0.0, 0.0}}};
    spec.novel = {Context{"n0", {0.0, 0.0, 0.0, 0.0}}};
    auto env = synthetic_grasp(spec);
    BinnedAction b{0, 3, 5, 2, 1, 10};
    CHECK(env->ground_truth_p(env->seen_contexts()[0], b) == 0.5);
    Rng rng(4);
    double mean = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
        mean += env->evaluate(env->seen_contexts()[0], center_of(env->space(), b), rng);
    mean /= n;
    CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("sampled outcome frequency matches ground truth within 3 sigma") {
    auto env = tabletop_6d();
    Rng pick(55);
    const auto& space = env->space();
    for (int trial = 0; trial < 10; ++trial) {
        BinnedAction b(space.size());
        for (std::size_t i = 0; i < space.size(); ++i)
            b[i] = static_cast<int>(pick.uniform_int(static_cast<std::size_t>(space.dim(i).bins)));
        const Context& ctx = env->seen_contexts()[pick.uniform_int(10)];
        const double p = env->ground_truth_p(ctx, b);
        Rng rng(1000 + trial);
        double freq = 0.0;
        const int n = 10000;
        for (int i = 0; i < n; ++i) freq += env->evaluate(ctx, center_of(space, b), rng);
        freq /= n;
        const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-6) / n);
        CHECK(std::abs(freq - p) < 3.0 * sigma + 1e-9);
    }
}

TEST_CASE("seen and novel pools are disjoint by id") {
    auto env = tabletop_6d();
    for (const auto& s : env->seen_contexts())
        for (const auto& n : env->novel_contexts()) CHECK(s.id != n.id);
    CHECK(env->seen_contexts().size() == 10);
    CHECK(env->novel_contexts().size() == 10);
}

TEST_CASE("tabletop-6d ranks h_G first by s1 in at least 18 of 20 seeds at N=256") {
    auto env = tabletop_6d();
    const auto& space = env->space();
    SaltelliDesign d(6, 256, true);
    int hits = 0;
    for (int seed = 0; seed < 20; ++seed) {
        Rng rng(1000 + static_cast<std::uint64_t>(seed));
        std::vector<double> y;
        y.reserve(d.row_count());
        for (std::size_t r = 0; r < d.row_count(); ++r) {
            const Context& ctx = env->seen_contexts()[rng.uniform_int(10)];
            y.push_back(env->evaluate(ctx, from_unit(space, d.row(r)), rng));
        }
        SensitivityReport rep = analyze(d, y);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < rep.s1.size(); ++i)
            if (rep.s1[i] > rep.s1[arg]) arg = i;
        hits += (space.dim(arg).name == "h_G");
    }
    INFO("h_G ranked first in " << hits << "/20 seeds");
    CHECK(hits >= 18);
}

TEST_CASE("exhaustive ceiling dominates random probes") {
    auto env = tabletop_6d();
    const double ceiling = env->ceiling_logit();
    Rng rng(77);
    const auto& space = env->space();
    for (int i = 0; i < 100000; ++i) {
        BinnedAction b(space.size());
        for (std::size_t d = 0; d < space.size(); ++d)
            b[d] = static_cast<int>(rng.uniform_int(static_cast<std::size_t>(space.dim(d).bins)));
        CHECK(env->action_logit(b) <= ceiling + 1e-12);
    }
    const Context& ctx = env->novel_contexts()[0];
    CHECK(env->ceiling_probability(ctx) ==
          PolicyModel::sigmoid(ceiling + env->context_term(ctx)));
}

TEST_CASE("environment presets are addressable by name") {
    CHECK(make_environment("ishigami")->space().size() == 3);
    CHECK(make_environment("gfunction")->space().size() == 6);
    CHECK(make_environment("tabletop-6d")->space().size() == 6);
    CHECK_THROWS_AS(make_environment("nope"), ParameterError);
}
