#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cassl/control_space.hpp"
#include "cassl/errors.hpp"

namespace cassl {

/// One black-box evaluation. `policy` holds one character per dimension:
/// 'q' quasi-random, 'g' greedy, 'r' epsilon-random, 'u' uncertainty-sampled.
struct TrialRecord {
    std::uint64_t trial_id = 0;
    int stage = 0;
    std::string context_id;
    std::vector<double> features;
    ActionVector action;
    BinnedAction bins;
    double outcome = 0.0;
    std::string policy;
    std::uint64_t seed = 0;
};

/// Append-only trial log. Stage labels must be non-decreasing.
class Dataset {
public:
    Dataset() = default;

    void append(TrialRecord rec) {
        if (!records_.empty() && rec.stage < records_.back().stage)
            throw ParameterError("Dataset: stage labels must be non-decreasing (got " +
                                 std::to_string(rec.stage) + " after " +
                                 std::to_string(records_.back().stage) + ")");
        records_.push_back(std::move(rec));
    }

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const TrialRecord& operator[](std::size_t i) const { return records_[i]; }
    const std::vector<TrialRecord>& records() const { return records_; }

    auto begin() const { return records_.begin(); }
    auto end() const { return records_.end(); }

    std::vector<double> outcomes() const {
        std::vector<double> y;
        y.reserve(records_.size());
        for (const auto& r : records_) y.push_back(r.outcome);
        return y;
    }

private:
    std::vector<TrialRecord> records_;
};

}  // namespace cassl
