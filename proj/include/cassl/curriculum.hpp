#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cassl/errors.hpp"
#include "cassl/sensitivity.hpp"

namespace cassl {

/// Ordered partition of control dimensions into learning stages.
struct Curriculum {
    std::vector<std::vector<int>> stages;  // disjoint, non-empty, union = all dims
    std::vector<int> flat_order;           // stage-consistent total order

    std::size_t stage_count() const { return stages.size(); }

    /// 1-based stage index of a dimension.
    int stage_of(int dim) const {
        for (std::size_t s = 0; s < stages.size(); ++s)
            for (int d : stages[s])
                if (d == dim) return static_cast<int>(s) + 1;
        throw ParameterError("Curriculum: dimension " + std::to_string(dim) + " not in any stage");
    }
};

namespace detail {

inline void check_report_for_curriculum(const SensitivityReport& rep) {
    if (rep.dimension() == 0 || rep.st.size() != rep.dimension())
        throw ShapeError("curriculum: malformed sensitivity report");
    if (!rep.has_second_order())
        throw ParameterError("curriculum: report lacks second-order indices required by the energy");
}

}  // namespace detail

/// Subset energy: sum of higher-order shares of the candidate plus its
/// absolute pairwise couplings to the dimensions left outside it.
inline double energy(const std::vector<int>& candidate, const std::vector<int>& remaining,
                     const SensitivityReport& report) {
    detail::check_report_for_curriculum(report);
    if (candidate.empty()) throw ParameterError("energy: candidate subset must be non-empty");
    std::vector<char> in_candidate(report.dimension(), 0), in_remaining(report.dimension(), 0);
    for (int j : remaining) {
        if (j < 0 || static_cast<std::size_t>(j) >= report.dimension())
            throw ParameterError("energy: remaining-set index out of range");
        in_remaining[static_cast<std::size_t>(j)] = 1;
    }
    for (int i : candidate) {
        if (i < 0 || static_cast<std::size_t>(i) >= report.dimension() ||
            !in_remaining[static_cast<std::size_t>(i)])
            throw ParameterError("energy: candidate must be a subset of the remaining set");
        in_candidate[static_cast<std::size_t>(i)] = 1;
    }
    double e = 0.0;
    for (int i : candidate) {
        e += report.st[static_cast<std::size_t>(i)] - report.s1[static_cast<std::size_t>(i)];
        for (int j : remaining)
            if (!in_candidate[static_cast<std::size_t>(j)])
                e += std::abs(report.s2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    return e;
}

/// Iterative minimum-energy partition: enumerate every non-empty subset of
/// the remaining dimensions, take the minimum as the next stage, repeat.
/// Ties (within 1e-12) go to smaller cardinality, then larger s1 sum, then
/// the lexicographically smallest index set. Within a stage, dimensions are
/// ordered by descending s1 (ties by lower index).
inline Curriculum build_curriculum(const SensitivityReport& report) {
    detail::check_report_for_curriculum(report);
    const int K = static_cast<int>(report.dimension());
    if (K > 20)
        throw ParameterError("build_curriculum: K = " + std::to_string(K) +
                             " exceeds the brute-force enumeration bound of 20");

    constexpr double kTie = 1e-12;
    Curriculum cur;
    std::vector<int> remaining(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) remaining[static_cast<std::size_t>(i)] = i;

    while (!remaining.empty()) {
        const std::size_t m = remaining.size();
        double best_e = 0.0;
        double best_s1 = 0.0;
        std::vector<int> best;
        std::vector<int> subset;
        for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
            subset.clear();
            double s1_sum = 0.0;
            for (std::size_t bit = 0; bit < m; ++bit)
                if (mask & (1u << bit)) {
                    subset.push_back(remaining[bit]);
                    s1_sum += report.s1[static_cast<std::size_t>(remaining[bit])];
                }
            const double e = energy(subset, remaining, report);
            bool take = false;
            if (best.empty() || e < best_e - kTie) {
                take = true;
            } else if (e <= best_e + kTie) {
                if (subset.size() != best.size())
                    take = subset.size() < best.size();
                else if (s1_sum != best_s1)
                    take = s1_sum > best_s1;
                else
                    take = subset < best;  // indices ascend within a mask scan
            }
            if (take) {
                best = subset;
                best_e = e;
                best_s1 = s1_sum;
            }
        }
        std::sort(best.begin(), best.end(), [&](int a, int b) {
            const double sa = report.s1[static_cast<std::size_t>(a)];
            const double sb = report.s1[static_cast<std::size_t>(b)];
            if (sa != sb) return sa > sb;
            return a < b;
        });
        for (int d : best) cur.flat_order.push_back(d);
        std::vector<int> next;
        for (int d : remaining)
            if (std::find(best.begin(), best.end(), d) == best.end()) next.push_back(d);
        cur.stages.push_back(std::move(best));
        remaining = std::move(next);
    }
    return cur;
}

}  // namespace cassl
