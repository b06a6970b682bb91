#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "cassl/errors.hpp"

namespace cassl {

using ActionVector = std::vector<double>;
using BinnedAction = std::vector<int>;
using UnitPoint = std::vector<double>;

/// One bounded, discretized control dimension.
struct ControlDim {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    int bins = 1;

    double width() const { return (max - min) / static_cast<double>(bins); }

    double center(int bin) const {
        return min + (static_cast<double>(bin) + 0.5) * width();
    }
};

/// An ordered set of control dimensions. Immutable after construction.
class ControlSpace {
public:
    ControlSpace() = default;

    explicit ControlSpace(std::vector<ControlDim> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw ParameterError("ControlSpace: need at least one dimension");
        std::unordered_set<std::string> names;
        for (const auto& d : dims_) {
            if (!(d.min < d.max))
                throw ParameterError("ControlSpace: min must be < max for dimension '" + d.name + "'");
            if (d.bins < 1)
                throw ParameterError("ControlSpace: bins must be >= 1 for dimension '" + d.name + "'");
            if (!names.insert(d.name).second)
                throw ParameterError("ControlSpace: duplicate dimension name '" + d.name + "'");
        }
    }

    std::size_t size() const { return dims_.size(); }
    const ControlDim& dim(std::size_t i) const { return dims_[i]; }
    const std::vector<ControlDim>& dims() const { return dims_; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(dims_.size());
        for (const auto& d : dims_) out.push_back(d.name);
        return out;
    }

    long long total_bins() const {
        long long n = 1;
        for (const auto& d : dims_) n *= d.bins;
        return n;
    }

    void check_valid(const ActionVector& a) const {
        if (a.size() != dims_.size())
            throw ShapeError("action has " + std::to_string(a.size()) + " values, space has " +
                             std::to_string(dims_.size()) + " dimensions");
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (a[i] < dims_[i].min || a[i] > dims_[i].max)
                throw RangeError("value " + std::to_string(a[i]) + " out of range for dimension '" +
                                 dims_[i].name + "' [" + std::to_string(dims_[i].min) + ", " +
                                 std::to_string(dims_[i].max) + "]");
        }
    }

private:
    std::vector<ControlDim> dims_;
};

/// The 6-D adaptive-grasping control space: angles in degrees, height as a
/// scale factor, gripper mode as an integer-valued dimension, force in N.
inline ControlSpace grasping_preset() {
    return ControlSpace({
        {"theta", -180.0, 180.0, 20},
        {"alpha", -10.0, 10.0, 10},
        {"beta", -30.0, 30.0, 10},
        {"h_G", 0.0, 1.0, 5},
        {"M_G", 0.0, 2.0, 3},
        {"f_G", 15.0, 60.0, 20},
    });
}

/// Componentwise map into the unit hypercube.
inline UnitPoint to_unit(const ControlSpace& space, const ActionVector& a) {
    space.check_valid(a);
    UnitPoint p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& d = space.dim(i);
        p[i] = (a[i] - d.min) / (d.max - d.min);
    }
    return p;
}

/// Exact inverse of to_unit.
inline ActionVector from_unit(const ControlSpace& space, const UnitPoint& p) {
    if (p.size() != space.size())
        throw ShapeError("unit point has " + std::to_string(p.size()) + " coordinates, space has " +
                         std::to_string(space.size()));
    ActionVector a(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& d = space.dim(i);
        if (p[i] < 0.0 || p[i] > 1.0)
            throw RangeError("unit coordinate " + std::to_string(p[i]) + " outside [0,1] for dimension '" +
                             d.name + "'");
        a[i] = d.min + p[i] * (d.max - d.min);
    }
    return a;
}

/// Half-open bin assignment with top clamp: bin = floor((a-min)/width),
/// a == max maps to the last bin.
inline BinnedAction bin_of(const ControlSpace& space, const ActionVector& a) {
    space.check_valid(a);
    BinnedAction b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& d = space.dim(i);
        int bin = static_cast<int>(std::floor((a[i] - d.min) / d.width()));
        if (bin < 0) bin = 0;
        if (bin >= d.bins) bin = d.bins - 1;
        b[i] = bin;
    }
    return b;
}

/// Bin centers as the continuous representative of a binned action.
inline ActionVector center_of(const ControlSpace& space, const BinnedAction& b) {
    if (b.size() != space.size())
        throw ShapeError("binned action has " + std::to_string(b.size()) + " indices, space has " +
                         std::to_string(space.size()));
    ActionVector a(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& d = space.dim(i);
        if (b[i] < 0 || b[i] >= d.bins)
            throw RangeError("bin " + std::to_string(b[i]) + " out of range for dimension '" + d.name +
                             "' with " + std::to_string(d.bins) + " bins");
        a[i] = d.center(b[i]);
    }
    return a;
}

}  // namespace cassl
