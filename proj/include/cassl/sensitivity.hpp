#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cassl/control_space.hpp"
#include "cassl/dataset.hpp"
#include "cassl/errors.hpp"
#include "cassl/rng.hpp"
#include "cassl/saltelli.hpp"

namespace cassl {

/// Sobol index estimates from one design-structured evaluation run.
/// Negative entries are estimator noise and are deliberately not clamped.
struct SensitivityReport {
    std::vector<double> s1;              // first-order, length K
    std::vector<double> st;              // total-order, length K
    std::vector<std::vector<double>> s2; // symmetric K x K, diagonal zero; empty without second order
    double var_y = 0.0;
    std::size_t n_base = 0;

    std::size_t dimension() const { return s1.size(); }
    bool has_second_order() const { return !s2.empty(); }
};

namespace detail {

inline double mean(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s / static_cast<double>(n);
}

/// Estimator core over output blocks laid out as
/// [f_A | f_AB_1..f_AB_K | (f_BA_1..f_BA_K) | f_B], each of length n.
/// Outputs are centered by the pooled A∪B mean first, which keeps the
/// estimates exactly invariant under affine rescaling of the outputs.
inline SensitivityReport analyze_blocks(const std::vector<double>& y_raw, int k, std::size_t n,
                                        bool second_order) {
    const std::size_t K = static_cast<std::size_t>(k);
    double m = 0.0;
    for (std::size_t r = 0; r < n; ++r) m += y_raw[r] + y_raw[y_raw.size() - n + r];
    m /= static_cast<double>(2 * n);
    std::vector<double> y(y_raw.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = y_raw[i] - m;

    const double* fA = y.data();
    const double* fB = y.data() + y.size() - n;
    auto fAB = [&](std::size_t i) { return y.data() + n * (1 + i); };
    auto fBA = [&](std::size_t i) { return y.data() + n * (1 + K + i); };

    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += fA[r] * fA[r] + fB[r] * fB[r];
    var /= static_cast<double>(2 * n);
    if (var == 0.0)
        throw DegenerateVarianceError("analyze: outputs have zero variance; indices undefined");

    SensitivityReport rep;
    rep.var_y = var;
    rep.n_base = n;
    rep.s1.resize(K);
    rep.st.resize(K);
    for (std::size_t i = 0; i < K; ++i) {
        const double* ab = fAB(i);
        double acc1 = 0.0, accT = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            acc1 += fB[r] * (ab[r] - fA[r]);
            const double d = fA[r] - ab[r];
            accT += d * d;
        }
        rep.s1[i] = acc1 / static_cast<double>(n) / var;
        rep.st[i] = accT / static_cast<double>(n) / (2.0 * var);
    }
    if (second_order) {
        // closed pair estimate averaged over both cross directions, so the
        // matrix is symmetric and relabelling dimensions permutes it exactly
        rep.s2.assign(K, std::vector<double>(K, 0.0));
        for (std::size_t i = 0; i < K; ++i) {
            for (std::size_t j = i + 1; j < K; ++j) {
                const double* ba_i = fBA(i);
                const double* ab_j = fAB(j);
                const double* ba_j = fBA(j);
                const double* ab_i = fAB(i);
                double acc = 0.0;
                for (std::size_t r = 0; r < n; ++r)
                    acc += 0.5 * (ba_i[r] * ab_j[r] + ba_j[r] * ab_i[r]) - fA[r] * fB[r];
                const double closed = acc / static_cast<double>(n) / var;
                rep.s2[i][j] = closed - rep.s1[i] - rep.s1[j];
                rep.s2[j][i] = rep.s2[i][j];
            }
        }
    }
    return rep;
}

}  // namespace detail

/// Sobol indices from outputs aligned to the design's rows.
/// s1: Saltelli-2010 estimator; st: Jansen estimator; s2: cross-matrix form.
inline SensitivityReport analyze(const SaltelliDesign& design, const std::vector<double>& outputs) {
    if (outputs.size() != design.row_count())
        throw ShapeError("analyze: " + std::to_string(outputs.size()) + " outputs for " +
                         std::to_string(design.row_count()) + " design rows");
    return detail::analyze_blocks(outputs, design.dimension(), design.base_count(),
                                  design.second_order());
}

/// Sensitivity analysis of collected trials: records must correspond to the
/// design rows one-to-one, in row order. Outcomes enter as plain reals
/// (binary outcomes as 0.0/1.0, no smoothing).
inline SensitivityReport analyze_dataset(const ControlSpace& space, const SaltelliDesign& design,
                                         const Dataset& records) {
    if (static_cast<std::size_t>(design.dimension()) != space.size())
        throw ShapeError("analyze_dataset: design dimension " + std::to_string(design.dimension()) +
                         " does not match space dimension " + std::to_string(space.size()));
    if (records.size() != design.row_count())
        throw ShapeError("analyze_dataset: " + std::to_string(records.size()) + " records for " +
                         std::to_string(design.row_count()) + " design rows");
    return analyze(design, records.outcomes());
}

/// Per-index bootstrap confidence half-widths (percentile bootstrap over base
/// rows, resampling all aligned blocks jointly).
struct BootstrapResult {
    std::vector<double> s1_halfwidth;
    std::vector<double> st_halfwidth;
    std::vector<std::vector<double>> s2_halfwidth;  // empty without second order
};

inline BootstrapResult bootstrap_ci(const SaltelliDesign& design, const std::vector<double>& outputs,
                                    std::size_t resamples, double confidence, Rng& rng) {
    if (resamples < 100)
        throw ParameterError("bootstrap_ci: resamples must be >= 100, got " + std::to_string(resamples));
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ParameterError("bootstrap_ci: confidence must be in (0,1)");
    if (outputs.size() != design.row_count())
        throw ShapeError("bootstrap_ci: " + std::to_string(outputs.size()) + " outputs for " +
                         std::to_string(design.row_count()) + " design rows");

    const std::size_t n = design.base_count();
    const std::size_t K = static_cast<std::size_t>(design.dimension());
    const std::size_t blocks = design.row_count() / n;

    std::vector<std::vector<double>> s1_samples(K), st_samples(K);
    std::vector<std::vector<std::vector<double>>> s2_samples;
    if (design.second_order())
        s2_samples.assign(K, std::vector<std::vector<double>>(K));
    std::vector<double> resampled(outputs.size());
    std::vector<std::size_t> idx(n);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t r = 0; r < n; ++r) idx[r] = rng.uniform_int(n);
        for (std::size_t blk = 0; blk < blocks; ++blk)
            for (std::size_t r = 0; r < n; ++r)
                resampled[blk * n + r] = outputs[blk * n + idx[r]];
        SensitivityReport rep;
        try {
            rep = detail::analyze_blocks(resampled, design.dimension(), n, design.second_order());
        } catch (const DegenerateVarianceError&) {
            continue;  // a degenerate resample carries no information
        }
        for (std::size_t i = 0; i < K; ++i) {
            s1_samples[i].push_back(rep.s1[i]);
            st_samples[i].push_back(rep.st[i]);
            if (design.second_order())
                for (std::size_t j = i + 1; j < K; ++j) s2_samples[i][j].push_back(rep.s2[i][j]);
        }
    }

    auto halfwidth = [&](std::vector<double>& v) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        const double a = (1.0 - confidence) / 2.0;
        auto quantile = [&](double q) {
            const double pos = q * static_cast<double>(v.size() - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const std::size_t hi = std::min(lo + 1, v.size() - 1);
            const double w = pos - static_cast<double>(lo);
            return v[lo] * (1.0 - w) + v[hi] * w;
        };
        return (quantile(1.0 - a) - quantile(a)) / 2.0;
    };

    BootstrapResult out;
    out.s1_halfwidth.resize(K);
    out.st_halfwidth.resize(K);
    if (design.second_order()) out.s2_halfwidth.assign(K, std::vector<double>(K, 0.0));
    for (std::size_t i = 0; i < K; ++i) {
        out.s1_halfwidth[i] = halfwidth(s1_samples[i]);
        out.st_halfwidth[i] = halfwidth(st_samples[i]);
        if (design.second_order())
            for (std::size_t j = i + 1; j < K; ++j) {
                out.s2_halfwidth[i][j] = halfwidth(s2_samples[i][j]);
                out.s2_halfwidth[j][i] = out.s2_halfwidth[i][j];
            }
    }
    return out;
}

}  // namespace cassl
