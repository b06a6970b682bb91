#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cassl/control_space.hpp"
#include "cassl/errors.hpp"
#include "cassl/learner.hpp"
#include "cassl/rng.hpp"

namespace cassl {

/// Black-box evaluation target. Benchmarks return a deterministic real and
/// ignore the rng; stochastic environments return a Bernoulli 0/1 outcome.
/// Implementations are immutable after construction; evaluate is reentrant
/// given independent rng handles.
class Environment {
public:
    virtual ~Environment() = default;
    virtual const ControlSpace& space() const = 0;
    virtual const std::vector<Context>& seen_contexts() const = 0;
    virtual const std::vector<Context>& novel_contexts() const = 0;
    virtual double evaluate(const Context& ctx, const ActionVector& a, Rng& rng) const = 0;
};

namespace detail {

inline std::vector<Context> bench_contexts(const std::string& tag) {
    return {Context{tag, {}}};
}

}  // namespace detail

/// Ishigami function on [-pi, pi]^3: the standard analytic SA benchmark.
class IshigamiEnv : public Environment {
public:
    explicit IshigamiEnv(double a = 7.0, double b = 0.1)
        : a_(a), b_(b),
          space_({{"x1", -M_PI, M_PI, 16}, {"x2", -M_PI, M_PI, 16}, {"x3", -M_PI, M_PI, 16}}),
          seen_(detail::bench_contexts("ishigami-seen")),
          novel_(detail::bench_contexts("ishigami-novel")) {}

    const ControlSpace& space() const override { return space_; }
    const std::vector<Context>& seen_contexts() const override { return seen_; }
    const std::vector<Context>& novel_contexts() const override { return novel_; }

    double evaluate(const Context&, const ActionVector& a, Rng&) const override {
        space_.check_valid(a);
        return std::sin(a[0]) + a_ * std::sin(a[1]) * std::sin(a[1]) +
               b_ * a[2] * a[2] * a[2] * a[2] * std::sin(a[0]);
    }

private:
    double a_, b_;
    ControlSpace space_;
    std::vector<Context> seen_, novel_;
};

/// Sobol g-function on [0,1]^K with coefficient vector a (a_i >= 0).
class GFunctionEnv : public Environment {
public:
    explicit GFunctionEnv(std::vector<double> a) : a_(std::move(a)) {
        if (a_.empty()) throw ParameterError("g_function: need at least one coefficient");
        std::vector<ControlDim> dims;
        for (std::size_t i = 0; i < a_.size(); ++i)
            dims.push_back({"x" + std::to_string(i + 1), 0.0, 1.0, 16});
        space_ = ControlSpace(std::move(dims));
        seen_ = detail::bench_contexts("gfunction-seen");
        novel_ = detail::bench_contexts("gfunction-novel");
    }

    const ControlSpace& space() const override { return space_; }
    const std::vector<Context>& seen_contexts() const override { return seen_; }
    const std::vector<Context>& novel_contexts() const override { return novel_; }

    double evaluate(const Context&, const ActionVector& x, Rng&) const override {
        space_.check_valid(x);
        double f = 1.0;
        for (std::size_t i = 0; i < a_.size(); ++i)
            f *= (std::abs(4.0 * x[i] - 2.0) + a_[i]) / (1.0 + a_[i]);
        return f;
    }

    const std::vector<double>& coefficients() const { return a_; }

private:
    std::vector<double> a_;
    ControlSpace space_;
    std::vector<Context> seen_, novel_;
};

inline std::unique_ptr<Environment> ishigami(double a = 7.0, double b = 0.1) {
    return std::make_unique<IshigamiEnv>(a, b);
}

inline std::unique_ptr<Environment> g_function(std::vector<double> a) {
    return std::make_unique<GFunctionEnv>(std::move(a));
}

/// Pairwise interaction term: gamma * cos(2*pi*(u_i + u_j) + psi) over the
/// unit-scaled bin midpoints of dimensions i and j.
struct PairTerm {
    int i = 0;
    int j = 0;
    double gamma = 0.0;
    double psi = 0.0;
};

/// Ground-truth description of a synthetic grasping-like environment:
/// success log-odds are base + bump-shaped bin-level main effects +
/// sparse pairwise couplings + a linear context term.
struct SyntheticGraspSpec {
    std::vector<double> amps;
    std::vector<double> centers;  // unit-scale bump centers
    std::vector<double> widths;   // unit-scale bump widths
    std::vector<PairTerm> pairs;
    double base = 0.0;
    double context_scale = 0.0;
    std::vector<double> context_weights;
    std::vector<Context> seen;
    std::vector<Context> novel;
};

class SyntheticGraspEnv : public Environment {
public:
    SyntheticGraspEnv(SyntheticGraspSpec spec, ControlSpace space = grasping_preset())
        : spec_(std::move(spec)), space_(std::move(space)) {
        const std::size_t K = space_.size();
        if (spec_.amps.size() != K || spec_.centers.size() != K || spec_.widths.size() != K)
            throw ShapeError("SyntheticGraspEnv: spec arrays must match the space dimension");
        for (double a : spec_.amps)
            if (!std::isfinite(a)) throw ParameterError("SyntheticGraspEnv: non-finite amplitude");
        for (const auto& t : spec_.pairs) {
            if (t.i < 0 || t.j < 0 || static_cast<std::size_t>(t.i) >= K ||
                static_cast<std::size_t>(t.j) >= K || t.i == t.j)
                throw ParameterError("SyntheticGraspEnv: invalid interaction pair");
            if (!std::isfinite(t.gamma)) throw ParameterError("SyntheticGraspEnv: non-finite gamma");
        }
        for (const auto& ctx : spec_.seen)
            for (const auto& ctx2 : spec_.novel)
                if (ctx.id == ctx2.id)
                    throw ParameterError("SyntheticGraspEnv: seen/novel pools share id '" + ctx.id + "'");
        profiles_.resize(K);
        for (std::size_t i = 0; i < K; ++i) {
            const int n = space_.dim(i).bins;
            std::vector<double> v(static_cast<std::size_t>(n));
            double mean = 0.0, vmax = -1.0;
            for (int b = 0; b < n; ++b) {
                const double u = (static_cast<double>(b) + 0.5) / static_cast<double>(n);
                const double d = (u - spec_.centers[i]) / spec_.widths[i];
                v[static_cast<std::size_t>(b)] = std::exp(-0.5 * d * d);
                mean += v[static_cast<std::size_t>(b)];
            }
            mean /= static_cast<double>(n);
            for (double x : v) vmax = std::max(vmax, x);
            const double span = vmax - mean;
            for (auto& x : v) x = span > 0.0 ? (x - mean) / span : 0.0;
            profiles_[i] = std::move(v);
        }
    }

    const ControlSpace& space() const override { return space_; }
    const std::vector<Context>& seen_contexts() const override { return spec_.seen; }
    const std::vector<Context>& novel_contexts() const override { return spec_.novel; }
    const SyntheticGraspSpec& spec() const { return spec_; }

    double main_effect(int dim, int bin) const {
        return spec_.amps[static_cast<std::size_t>(dim)] *
               profiles_[static_cast<std::size_t>(dim)][static_cast<std::size_t>(bin)];
    }

    double interaction(const PairTerm& t, int bi, int bj) const {
        const double ui = (static_cast<double>(bi) + 0.5) / space_.dim(static_cast<std::size_t>(t.i)).bins;
        const double uj = (static_cast<double>(bj) + 0.5) / space_.dim(static_cast<std::size_t>(t.j)).bins;
        return t.gamma * std::cos(2.0 * M_PI * (ui + uj) + t.psi);
    }

    /// Context-free part of the log-odds for a bin tuple.
    double action_logit(const BinnedAction& b) const {
        double z = spec_.base;
        for (std::size_t i = 0; i < space_.size(); ++i) z += main_effect(static_cast<int>(i), b[i]);
        for (const auto& t : spec_.pairs)
            z += interaction(t, b[static_cast<std::size_t>(t.i)], b[static_cast<std::size_t>(t.j)]);
        return z;
    }

    double context_term(const Context& ctx) const {
        double z = 0.0;
        const std::size_t n = std::min(ctx.features.size(), spec_.context_weights.size());
        for (std::size_t f = 0; f < n; ++f) z += spec_.context_weights[f] * ctx.features[f];
        return spec_.context_scale * z;
    }

    double ground_truth_p(const Context& ctx, const BinnedAction& b) const {
        return PolicyModel::sigmoid(action_logit(b) + context_term(ctx));
    }

    double evaluate(const Context& ctx, const ActionVector& a, Rng& rng) const override {
        const BinnedAction b = bin_of(space_, a);
        return rng.bernoulli(ground_truth_p(ctx, b)) ? 1.0 : 0.0;
    }

    /// Context-free log-odds of the best bin tuple, by exhaustive grid
    /// search (computed once on first use).
    double ceiling_logit() const {
        if (!ceiling_) {
            BinnedAction b(space_.size(), 0);
            double best = action_logit(b);
            while (true) {
                std::size_t i = 0;
                while (i < b.size()) {
                    if (++b[i] < space_.dim(i).bins) break;
                    b[i] = 0;
                    ++i;
                }
                if (i == b.size()) break;
                best = std::max(best, action_logit(b));
            }
            ceiling_ = best;
        }
        return *ceiling_;
    }

    /// The environment's ceiling metric: best attainable success probability
    /// for a context.
    double ceiling_probability(const Context& ctx) const {
        return PolicyModel::sigmoid(ceiling_logit() + context_term(ctx));
    }

private:
    SyntheticGraspSpec spec_;
    ControlSpace space_;
    std::vector<std::vector<double>> profiles_;
    mutable std::optional<double> ceiling_;
};

inline std::unique_ptr<SyntheticGraspEnv> synthetic_grasp(SyntheticGraspSpec spec,
                                                          ControlSpace space = grasping_preset()) {
    return std::make_unique<SyntheticGraspEnv>(std::move(spec), std::move(space));
}

/// The "tabletop-6d" preset over the 6-D grasping control space. Constants
/// are frozen from a desk-scale calibration study; main-effect magnitudes
/// are ordered h_G > theta > f_G > M_G > alpha > beta and the four couplings
/// are anti-aligned with the main-effect optima.
inline SyntheticGraspSpec tabletop_6d_spec() {
    SyntheticGraspSpec s;
    // dim order: theta, alpha, beta, h_G, M_G, f_G
    s.amps = {1.7, 1.0, 0.9, 5.0, 1.1, 1.5};
    s.centers = {0.3639964580017214, 0.5343774059360908, 0.6295347108731385,
                 0.4189040947041185, 0.5739598086185208, 0.4855536641223932};
    s.widths = {0.10, 0.12, 0.12, 0.16, 0.30, 0.10};
    s.pairs = {
        {0, 1, 2.6, -2.670353755551324},
        {0, 2, 2.2, -3.298672286269282},
        {5, 1, 1.9, -3.298672286269282},
        {5, 2, 1.7, -3.9269908169872414},
    };
    s.base = -4.8;
    s.context_scale = 0.3;
    s.context_weights = {0.5, -0.5, 0.6, -0.4};
    s.seen = {
        {"seen0", {1.0, 0.0, 0.01206134909678891, 0.13018326356897658}},
        {"seen1", {0.0, 1.0, 0.023831919384103672, 0.9443727442724259}},
        {"seen2", {1.0, 0.0, 0.22980628393824754, 0.136566995789152}},
        {"seen3", {0.0, 1.0, -0.42642655426173603, 0.10902290649779323}},
        {"seen4", {1.0, 0.0, -0.06495294889819503, 0.2201160160388742}},
        {"seen5", {0.0, 1.0, 0.8608849953593323, -0.5082292327191338}},
        {"seen6", {1.0, 0.0, -0.38112332271295, -0.21784069792220562}},
        {"seen7", {0.0, 1.0, -0.4594565352013802, -0.2999701011427722}},
        {"seen8", {1.0, 0.0, 0.8724593821793714, -0.2442315683265317}},
        {"seen9", {0.0, 1.0, 0.5492984175998201, -0.9188655192206918}},
    };
    s.novel = {
        {"novel0", {0.0, 1.0, -0.4026888082308786, 0.4051822933159641}},
        {"novel1", {1.0, 0.0, -0.09549475829555476, 0.7797157810050399}},
        {"novel2", {0.0, 1.0, -0.12979993686787683, 0.24711959124407712}},
        {"novel3", {1.0, 0.0, 0.17075943100780822, 0.19826348851771924}},
        {"novel4", {0.0, 1.0, 0.31137131028567966, 0.022563962809735827}},
        {"novel5", {1.0, 0.0, -0.6126404926602302, -0.8620652355777239}},
        {"novel6", {0.0, 1.0, -0.49590861609688863, -0.809614325278242}},
        {"novel7", {1.0, 0.0, -0.7737412667676626, -0.43882833408056987}},
        {"novel8", {0.0, 1.0, 0.18503270417599382, -0.3135549461319136}},
        {"novel9", {1.0, 0.0, 0.5556984640035683, 0.9307709249970679}},
    };
    return s;
}

inline std::unique_ptr<SyntheticGraspEnv> tabletop_6d() {
    return synthetic_grasp(tabletop_6d_spec());
}

/// Presets addressable by name: "ishigami", "gfunction", "tabletop-6d".
inline std::unique_ptr<Environment> make_environment(const std::string& preset) {
    if (preset == "ishigami") return ishigami();
    if (preset == "gfunction") return g_function({0.0, 1.0, 4.5, 9.0, 99.0, 99.0});
    if (preset == "tabletop-6d") return tabletop_6d();
    throw ParameterError("unknown environment preset '" + preset + "'");
}

}  // namespace cassl
