#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <functional>

#include "cassl/control_space.hpp"
#include "cassl/dataset.hpp"
#include "cassl/rng.hpp"
#include "cassl/sensitivity.hpp"

using namespace cassl;

namespace {

std::vector<double> evaluate_rows(const SaltelliDesign& d,
                                  const std::function<double(const std::vector<double>&)>& f) {
    std::vector<double> y;
    y.reserve(d.row_count());
    for (std::size_t r = 0; r < d.row_count(); ++r) y.push_back(f(d.row(r)));
    return y;
}

}  // namespace

TEST_CASE("f(x)=x1 puts all variance on the first input") {
    SaltelliDesign d(3, 1 << 12, true);
    auto y = evaluate_rows(d, [](const std::vector<double>& x) { return x[0]; });
    SensitivityReport rep = analyze(d, y);
    CHECK(rep.s1[0] == Catch::Approx(1.0).margin(0.01));
    CHECK(rep.st[0] == Catch::Approx(1.0).margin(0.01));
    for (int i : {1, 2}) {
        CHECK(std::abs(rep.s1[static_cast<std::size_t>(i)]) < 0.01);
        CHECK(std::abs(rep.st[static_cast<std::size_t>(i)]) < 0.01);
    }
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(rep.s2[i][j]) < 0.02);
    CHECK(rep.n_base == (1u << 12));
}

TEST_CASE("degenerate and mismatched inputs are rejected") {
    SaltelliDesign d(2, 8, true);
    std::vector<double> flat(d.row_count(), 0.0);
    CHECK_THROWS_AS(analyze(d, flat), DegenerateVarianceError);
    std::vector<double> wrong(d.row_count() - 1, 0.0);
    CHECK_THROWS_AS(analyze(d, wrong), ShapeError);
}

TEST_CASE("additive model: total equals first order") {
    SaltelliDesign d(3, 1 << 13, true);
    auto y = evaluate_rows(d, [](const std::vector<double>& x) {
        return 1.0 * x[0] + 2.0 * x[1] + 3.0 * x[2];
    });
    SensitivityReport rep = analyze(d, y);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(rep.st[i] - rep.s1[i]) < 0.02);
}

TEST_CASE("affine rescaling of outputs leaves indices unchanged") {
    SaltelliDesign d(3, 1 << 10, true);
    auto y = evaluate_rows(d, [](const std::vector<double>& x) {
        return std::sin(6.0 * x[0]) + x[1] * x[2];
    });
    auto y2 = y;
    for (auto& v : y2) v = 2.0 * v + 7.0;
    SensitivityReport a = analyze(d, y), b = analyze(d, y2);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(a.s1[i] - b.s1[i]) < 1e-10);
        CHECK(std::abs(a.st[i] - b.st[i]) < 1e-10);
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(a.s2[i][j] - b.s2[i][j]) < 1e-10);
    }
}

TEST_CASE("permuting dimension order permutes the report consistently") {
    // Relabelling dimension i as perm[i] reorders the output blocks: the AB
    // block of the relabelled dim i is the old AB block of perm[i]. The
    // report must permute the same way, exactly.
    const int K = 3;
    const int perm[3] = {2, 0, 1};  // new dim i = old dim perm[i]
    auto f = [](const std::vector<double>& x) {
        return std::sin(5.0 * x[0]) + 2.0 * x[1] * x[1] + x[0] * x[2];
    };
    SaltelliDesign d(K, 1 << 10, true);
    auto y = evaluate_rows(d, f);
    const std::size_t n = d.base_count();

    std::vector<double> y_perm(y.size());
    for (std::size_t r = 0; r < n; ++r) {
        y_perm[d.a_offset() + r] = y[d.a_offset() + r];
        y_perm[d.b_offset() + r] = y[d.b_offset() + r];
        for (int i = 0; i < K; ++i) {
            y_perm[d.ab_offset(i) + r] = y[d.ab_offset(perm[i]) + r];
            y_perm[d.ba_offset(i) + r] = y[d.ba_offset(perm[i]) + r];
        }
    }
    SensitivityReport a = analyze(d, y);
    SensitivityReport b = analyze(d, y_perm);

    for (int i = 0; i < K; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const auto pi = static_cast<std::size_t>(perm[i]);
        CHECK(b.s1[ii] == Catch::Approx(a.s1[pi]).margin(1e-12));
        CHECK(b.st[ii] == Catch::Approx(a.st[pi]).margin(1e-12));
        for (int j = 0; j < K; ++j) {
            if (i == j) continue;
            const auto jj = static_cast<std::size_t>(j);
            const auto pj = static_cast<std::size_t>(perm[j]);
            CHECK(b.s2[ii][jj] == Catch::Approx(a.s2[pi][pj]).margin(1e-12));
        }
    }
}

TEST_CASE("analyze_dataset delegates and validates alignment") {
    ControlSpace space({{"x", 0.0, 1.0, 4}, {"y", 0.0, 1.0, 4}});
    SaltelliDesign d(2, 16, true);
    Dataset data;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        TrialRecord rec;
        rec.trial_id = r;
        rec.context_id = "c";
        rec.action = from_unit(space, d.row(r));
        rec.bins = bin_of(space, rec.action);
        rec.outcome = d.row(r)[0] > 0.5 ? 1.0 : 0.0;
        rec.policy = "qq";
        data.append(rec);
    }
    SensitivityReport rep = analyze_dataset(space, d, data);
    SensitivityReport direct = analyze(d, data.outcomes());
    CHECK(rep.s1 == direct.s1);
    CHECK(rep.st == direct.st);

    Dataset zeros;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        TrialRecord rec;
        rec.trial_id = r;
        rec.action = from_unit(space, d.row(r));
        rec.bins = bin_of(space, rec.action);
        rec.outcome = 0.0;
        zeros.append(rec);
    }
    CHECK_THROWS_AS(analyze_dataset(space, d, zeros), DegenerateVarianceError);

    Dataset short_data;
    short_data.append(TrialRecord{});
    CHECK_THROWS_AS(analyze_dataset(space, d, short_data), ShapeError);
}

TEST_CASE("bootstrap confidence intervals") {
    SaltelliDesign d(3, 1 << 13, true);
    auto y = evaluate_rows(d, [](const std::vector<double>& x) { return x[0]; });

    Rng rng(99);
    BootstrapResult ci80 = bootstrap_ci(d, y, 200, 0.80, rng);
    CHECK(ci80.s1_halfwidth[0] < 0.02);
    Rng rng95(99);
    BootstrapResult ci = bootstrap_ci(d, y, 200, 0.95, rng95);
    CHECK(ci.s1_halfwidth[0] < 0.03);

    Rng r1(4242), r2(4242);
    BootstrapResult a = bootstrap_ci(d, y, 120, 0.9, r1);
    BootstrapResult b = bootstrap_ci(d, y, 120, 0.9, r2);
    CHECK(a.s1_halfwidth == b.s1_halfwidth);
    CHECK(a.st_halfwidth == b.st_halfwidth);

    Rng r3(1);
    CHECK_THROWS_AS(bootstrap_ci(d, y, 0, 0.95, r3), ParameterError);
    CHECK_THROWS_AS(bootstrap_ci(d, y, 99, 0.95, r3), ParameterError);
}

TEST_CASE("sum of first-order indices respects the noise-tolerant Sobol bound") {
    SaltelliDesign d(3, 1 << 10, true);
    auto y = evaluate_rows(d, [](const std::vector<double>& x) {
        const double x1 = -M_PI + 2.0 * M_PI * x[0];
        const double x2 = -M_PI + 2.0 * M_PI * x[1];
        const double x3 = -M_PI + 2.0 * M_PI * x[2];
        return std::sin(x1) + 7.0 * std::sin(x2) * std::sin(x2) +
               0.1 * x3 * x3 * x3 * x3 * std::sin(x1);
    });
    SensitivityReport rep = analyze(d, y);
    Rng rng(5);
    BootstrapResult ci = bootstrap_ci(d, y, 150, 0.95, rng);
    double s1_sum = 0.0, max_hw = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        s1_sum += rep.s1[i];
        max_hw = std::max(max_hw, ci.s1_halfwidth[i]);
    }
    CHECK(s1_sum <= 1.0 + 3.0 * max_hw);
}
