#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "cassl/control_space.hpp"
#include "cassl/dataset.hpp"
#include "cassl/errors.hpp"
#include "cassl/rng.hpp"

namespace cassl {

/// Environment-defined object descriptor standing in for the scene image.
struct Context {
    std::string id;
    std::vector<double> features;
};

/// Per-dimension, per-bin success probabilities. These are independent
/// Bernoulli parameters, not a distribution over bins.
struct BinProbabilities {
    std::vector<std::vector<double>> p;

    const std::vector<double>& dim(int i) const { return p[static_cast<std::size_t>(i)]; }
};

enum class LearnerKind { Tabular, Logistic };

struct LearnerConfig {
    LearnerKind kind = LearnerKind::Tabular;
    // tabular
    double smoothing_alpha = 1.0;
    double smoothing_beta = 1.0;
    int clusters = 1;            // context clusters; 1 = context-agnostic
    int cluster_features = 0;    // leading features used for cluster hashing
    // logistic
    int epochs = 15;
    double learning_rate = 1e-4;
    int batch_size = 64;
    std::uint64_t fit_seed = 0;
};

/// Per-dimension, per-bin success-probability model. Two reference learners
/// honor the same contract: a context-clustered Beta-Bernoulli table and a
/// per-(dim,bin) logistic regression over context features. Immutable
/// between fits; safe to share across threads once trained.
class PolicyModel {
public:
    PolicyModel(const ControlSpace& space, LearnerConfig config, std::size_t feature_length)
        : config_(config), feature_length_(feature_length), trained_(false) {
        if (config_.clusters < 1) throw ParameterError("PolicyModel: clusters must be >= 1");
        bins_.reserve(space.size());
        for (const auto& d : space.dims()) bins_.push_back(d.bins);
        if (config_.kind == LearnerKind::Tabular) {
            success_.assign(static_cast<std::size_t>(config_.clusters), make_table());
            total_.assign(static_cast<std::size_t>(config_.clusters), make_table());
        } else {
            weights_.resize(bins_.size());
            for (std::size_t i = 0; i < bins_.size(); ++i)
                weights_[i].assign(static_cast<std::size_t>(bins_[i]),
                                   std::vector<double>(feature_length_ + 1, 0.0));
        }
    }

    LearnerKind kind() const { return config_.kind; }
    const LearnerConfig& config() const { return config_; }
    std::size_t feature_length() const { return feature_length_; }
    const std::vector<int>& bins() const { return bins_; }
    bool trained() const { return trained_; }

    int cluster_of(const Context& ctx) const {
        if (config_.clusters <= 1 || config_.cluster_features <= 0) return 0;
        std::uint64_t h = 1469598103934665603ULL;
        const int n = std::min<int>(config_.cluster_features, static_cast<int>(ctx.features.size()));
        for (int i = 0; i < n; ++i) {
            h ^= static_cast<std::uint64_t>(std::llround(ctx.features[static_cast<std::size_t>(i)]));
            h *= 1099511628211ULL;
        }
        return static_cast<int>(h % static_cast<std::uint64_t>(config_.clusters));
    }

    BinProbabilities predict(const Context& ctx) const {
        if (ctx.features.size() != feature_length_)
            throw ShapeError("predict: context has " + std::to_string(ctx.features.size()) +
                             " features, model expects " + std::to_string(feature_length_));
        BinProbabilities out;
        out.p.resize(bins_.size());
        if (config_.kind == LearnerKind::Tabular) {
            const auto& s = success_[static_cast<std::size_t>(cluster_of(ctx))];
            const auto& n = total_[static_cast<std::size_t>(cluster_of(ctx))];
            for (std::size_t i = 0; i < bins_.size(); ++i) {
                out.p[i].resize(static_cast<std::size_t>(bins_[i]));
                for (std::size_t b = 0; b < out.p[i].size(); ++b)
                    out.p[i][b] = (s[i][b] + config_.smoothing_alpha) /
                                  (n[i][b] + config_.smoothing_alpha + config_.smoothing_beta);
            }
        } else {
            for (std::size_t i = 0; i < bins_.size(); ++i) {
                out.p[i].resize(static_cast<std::size_t>(bins_[i]));
                for (std::size_t b = 0; b < out.p[i].size(); ++b)
                    out.p[i][b] = sigmoid(logit(ctx, i, b));
            }
        }
        return out;
    }

    /// Fits on weighted records. Tabular refits from the aggregate counts;
    /// logistic warm-starts from the current weights (call reset() first for
    /// a from-scratch fit). Masked loss semantics: each record
    /// touches, per dimension, only the bin it executed.
    void fit(const Dataset& data, const std::vector<double>& weights) {
        if (data.empty()) throw ParameterError("fit: dataset is empty");
        if (!weights.empty() && weights.size() != data.size())
            throw ShapeError("fit: " + std::to_string(weights.size()) + " weights for " +
                             std::to_string(data.size()) + " records");
        if (config_.kind == LearnerKind::Tabular)
            fit_tabular(data, weights);
        else
            fit_logistic(data, weights);
        trained_ = true;
    }

    void reset() {
        if (config_.kind == LearnerKind::Tabular) {
            success_.assign(static_cast<std::size_t>(config_.clusters), make_table());
            total_.assign(static_cast<std::size_t>(config_.clusters), make_table());
        } else {
            for (auto& dim : weights_)
                for (auto& w : dim) std::fill(w.begin(), w.end(), 0.0);
        }
        trained_ = false;
    }

    /// Masked joint loss: sum over records of the cross-entropy at each
    /// dimension's executed bin, weighted per record.
    double masked_loss(const Dataset& data, const std::vector<double>& weights) const {
        require_logistic("masked_loss");
        double loss = 0.0;
        for (std::size_t r = 0; r < data.size(); ++r) {
            const double w = weights.empty() ? 1.0 : weights[r];
            const auto& rec = data[r];
            for (std::size_t i = 0; i < bins_.size(); ++i) {
                const double z = logit_rec(rec, i, static_cast<std::size_t>(rec.bins[i]));
                loss += w * (softplus(z) - rec.outcome * z);
            }
        }
        return loss;
    }

    /// Analytic gradient of masked_loss with respect to every weight entry.
    /// Entries of bins never executed in `data` are exactly zero.
    std::vector<std::vector<std::vector<double>>> masked_loss_gradient(
        const Dataset& data, const std::vector<double>& weights) const {
        require_logistic("masked_loss_gradient");
        auto grad = weights_;
        for (auto& dim : grad)
            for (auto& w : dim) std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t r = 0; r < data.size(); ++r) {
            const double w = weights.empty() ? 1.0 : weights[r];
            accumulate_gradient(data[r], w, grad);
        }
        return grad;
    }

    const std::vector<std::vector<std::vector<double>>>& weights() const { return weights_; }
    void set_weights(std::vector<std::vector<std::vector<double>>> w) { weights_ = std::move(w); }

    double success_mass(int cluster, int dim, int bin) const {
        return success_[static_cast<std::size_t>(cluster)][static_cast<std::size_t>(dim)]
                       [static_cast<std::size_t>(bin)];
    }
    double total_mass(int cluster, int dim, int bin) const {
        return total_[static_cast<std::size_t>(cluster)][static_cast<std::size_t>(dim)]
                     [static_cast<std::size_t>(bin)];
    }
    void set_counts(std::vector<std::vector<std::vector<double>>> success,
                    std::vector<std::vector<std::vector<double>>> total) {
        success_ = std::move(success);
        total_ = std::move(total);
    }
    const std::vector<std::vector<std::vector<double>>>& success_counts() const { return success_; }
    const std::vector<std::vector<std::vector<double>>>& total_counts() const { return total_; }
    void mark_trained() { trained_ = true; }

    static double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

private:
    using Table = std::vector<std::vector<double>>;

    Table make_table() const {
        Table t(bins_.size());
        for (std::size_t i = 0; i < bins_.size(); ++i)
            t[i].assign(static_cast<std::size_t>(bins_[i]), 0.0);
        return t;
    }

    void require_logistic(const char* op) const {
        if (config_.kind != LearnerKind::Logistic)
            throw StateError(std::string(op) + ": only defined for the logistic learner");
    }

    static double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

    double logit(const Context& ctx, std::size_t dim, std::size_t bin) const {
        const auto& w = weights_[dim][bin];
        double z = w[0];
        for (std::size_t f = 0; f < feature_length_; ++f) z += w[f + 1] * ctx.features[f];
        return z;
    }

    double logit_rec(const TrialRecord& rec, std::size_t dim, std::size_t bin) const {
        const auto& w = weights_[dim][bin];
        double z = w[0];
        for (std::size_t f = 0; f < feature_length_; ++f) z += w[f + 1] * rec.features[f];
        return z;
    }

    void accumulate_gradient(const TrialRecord& rec, double w,
                             std::vector<std::vector<std::vector<double>>>& grad) const {
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            const std::size_t b = static_cast<std::size_t>(rec.bins[i]);
            const double err = sigmoid(logit_rec(rec, i, b)) - rec.outcome;
            auto& g = grad[i][b];
            g[0] += w * err;
            for (std::size_t f = 0; f < feature_length_; ++f) g[f + 1] += w * err * rec.features[f];
        }
    }

    void fit_tabular(const Dataset& data, const std::vector<double>& weights) {
        success_.assign(static_cast<std::size_t>(config_.clusters), make_table());
        total_.assign(static_cast<std::size_t>(config_.clusters), make_table());
        for (std::size_t r = 0; r < data.size(); ++r) {
            const auto& rec = data[r];
            if (rec.bins.size() != bins_.size())
                throw ShapeError("fit: record bins do not match the control space");
            const double w = weights.empty() ? 1.0 : weights[r];
            Context ctx{rec.context_id, rec.features};
            auto& s = success_[static_cast<std::size_t>(cluster_of(ctx))];
            auto& n = total_[static_cast<std::size_t>(cluster_of(ctx))];
            for (std::size_t i = 0; i < bins_.size(); ++i) {
                const std::size_t b = static_cast<std::size_t>(rec.bins[i]);
                n[i][b] += w;
                s[i][b] += w * rec.outcome;
            }
        }
    }

    void fit_logistic(const Dataset& data, const std::vector<double>& weights) {
        Rng rng(config_.fit_seed);
        std::vector<std::size_t> order(data.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        const std::size_t B = config_.batch_size > 0 ? static_cast<std::size_t>(config_.batch_size)
                                                     : data.size();
        auto grad = weights_;
        for (int epoch = 0; epoch < config_.epochs; ++epoch) {
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.uniform_int(i)]);
            for (std::size_t start = 0; start < order.size(); start += B) {
                const std::size_t end = std::min(start + B, order.size());
                for (auto& dim : grad)
                    for (auto& w : dim) std::fill(w.begin(), w.end(), 0.0);
                for (std::size_t k = start; k < end; ++k) {
                    const std::size_t r = order[k];
                    accumulate_gradient(data[r], weights.empty() ? 1.0 : weights[r], grad);
                }
                for (std::size_t i = 0; i < weights_.size(); ++i)
                    for (std::size_t b = 0; b < weights_[i].size(); ++b)
                        for (std::size_t f = 0; f < weights_[i][b].size(); ++f)
                            weights_[i][b][f] -= config_.learning_rate * grad[i][b][f];
            }
        }
    }

    LearnerConfig config_;
    std::size_t feature_length_;
    bool trained_;
    std::vector<int> bins_;
    std::vector<std::vector<std::vector<double>>> success_;  // [cluster][dim][bin]
    std::vector<std::vector<std::vector<double>>> total_;    // [cluster][dim][bin]
    std::vector<std::vector<std::vector<double>>> weights_;  // [dim][bin][1+F]
};

namespace detail {

inline void check_dim(const BinProbabilities& p, int dim) {
    if (dim < 0 || static_cast<std::size_t>(dim) >= p.p.size())
        throw ParameterError("selection: dimension index " + std::to_string(dim) + " out of range");
}

template <typename Score>
int select_extremal(const std::vector<double>& probs, Score score, Rng& rng) {
    // scores within a few ulps count as tied, so that pairs like (0.3, 0.7)
    // tie under p(1-p) despite rounding
    constexpr double kTieTol = 16.0 * 2.220446049250313e-16;
    double best = score(probs[0]);
    for (std::size_t b = 1; b < probs.size(); ++b) best = std::max(best, score(probs[b]));
    std::vector<int> ties;
    for (std::size_t b = 0; b < probs.size(); ++b)
        if (best - score(probs[b]) <= kTieTol) ties.push_back(static_cast<int>(b));
    return ties.size() == 1 ? ties[0] : ties[rng.uniform_int(ties.size())];
}

}  // namespace detail

/// Most uncertain bin: argmax of the Bernoulli variance p(1-p), i.e. the bin
/// closest to 0.5. Ties break uniformly at random; complementary pairs like
/// (0.3, 0.7) tie exactly.
inline int select_uncertain(const BinProbabilities& p, int dim, Rng& rng) {
    detail::check_dim(p, dim);
    return detail::select_extremal(p.dim(dim), [](double v) { return v * (1.0 - v); }, rng);
}

/// Highest-probability bin, ties uniform.
inline int select_greedy(const BinProbabilities& p, int dim, Rng& rng) {
    detail::check_dim(p, dim);
    return detail::select_extremal(p.dim(dim), [](double v) { return v; }, rng);
}

/// Epsilon-greedy selection plus the policy tag ('r' random, 'g' greedy).
inline std::pair<int, char> select_eps_greedy_tagged(const BinProbabilities& p, int dim, double eps,
                                                     Rng& rng) {
    detail::check_dim(p, dim);
    if (!(eps >= 0.0 && eps <= 1.0))
        throw ParameterError("select_eps_greedy: epsilon must be in [0,1], got " + std::to_string(eps));
    if (rng.uniform01() < eps)
        return {static_cast<int>(rng.uniform_int(p.dim(dim).size())), 'r'};
    return {select_greedy(p, dim, rng), 'g'};
}

inline int select_eps_greedy(const BinProbabilities& p, int dim, double eps, Rng& rng) {
    return select_eps_greedy_tagged(p, dim, eps, rng).first;
}

}  // namespace cassl
