#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cassl/curriculum.hpp"
#include "cassl/sensitivity.hpp"

namespace cassl {

/// Reference re-implementation of the curriculum construction, kept
/// deliberately independent of build_curriculum: recursive subset
/// enumeration and a row-sum energy formulation. Used by tests and the
/// acceptance suite as the exhaustive oracle.
namespace oracle_detail {

struct Candidate {
    std::vector<int> dims;  // ascending
    double e = 0.0;
    double s1_sum = 0.0;
};

inline bool preferred(const Candidate& a, const Candidate& b) {
    if (a.e < b.e - 1e-12) return true;
    if (a.e > b.e + 1e-12) return false;
    if (a.dims.size() != b.dims.size()) return a.dims.size() < b.dims.size();
    if (a.s1_sum != b.s1_sum) return a.s1_sum > b.s1_sum;
    return a.dims < b.dims;
}

inline void enumerate(const std::vector<int>& pool, std::size_t from, Candidate& partial,
                      const std::vector<double>& row_abs, const SensitivityReport& rep,
                      Candidate& best, bool& has_best) {
    if (!partial.dims.empty()) {
        // energy = sum over members of (st - s1 + |s2| row over pool)
        //          minus the members' mutual |s2| (counted from both sides)
        double mutual = 0.0;
        for (std::size_t x = 0; x < partial.dims.size(); ++x)
            for (std::size_t y = 0; y < partial.dims.size(); ++y)
                if (x != y)
                    mutual += std::abs(rep.s2[static_cast<std::size_t>(partial.dims[x])]
                                             [static_cast<std::size_t>(partial.dims[y])]);
        double e = -mutual;
        for (int d : partial.dims)
            e += rep.st[static_cast<std::size_t>(d)] - rep.s1[static_cast<std::size_t>(d)] +
                 row_abs[static_cast<std::size_t>(d)];
        Candidate cand = partial;
        cand.e = e;
        if (!has_best || preferred(cand, best)) {
            best = cand;
            has_best = true;
        }
    }
    for (std::size_t i = from; i < pool.size(); ++i) {
        partial.dims.push_back(pool[i]);
        partial.s1_sum += rep.s1[static_cast<std::size_t>(pool[i])];
        enumerate(pool, i + 1, partial, row_abs, rep, best, has_best);
        partial.s1_sum -= rep.s1[static_cast<std::size_t>(pool[i])];
        partial.dims.pop_back();
    }
}

}  // namespace oracle_detail

inline Curriculum oracle_curriculum(const SensitivityReport& report) {
    detail::check_report_for_curriculum(report);
    Curriculum cur;
    std::vector<int> pool;
    for (std::size_t i = 0; i < report.dimension(); ++i) pool.push_back(static_cast<int>(i));

    while (!pool.empty()) {
        std::vector<double> row_abs(report.dimension(), 0.0);
        for (int i : pool)
            for (int j : pool)
                if (i != j)
                    row_abs[static_cast<std::size_t>(i)] +=
                        std::abs(report.s2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        oracle_detail::Candidate best, partial;
        bool has_best = false;
        oracle_detail::enumerate(pool, 0, partial, row_abs, report, best, has_best);

        std::vector<int> stage = best.dims;
        std::stable_sort(stage.begin(), stage.end(), [&](int a, int b) {
            return report.s1[static_cast<std::size_t>(a)] > report.s1[static_cast<std::size_t>(b)];
        });
        for (int d : stage) cur.flat_order.push_back(d);
        std::vector<int> rest;
        for (int d : pool)
            if (std::find(stage.begin(), stage.end(), d) == stage.end()) rest.push_back(d);
        cur.stages.push_back(std::move(stage));
        pool = std::move(rest);
    }
    return cur;
}

}  // namespace cassl
