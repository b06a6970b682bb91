#pragma once

#include <stdexcept>
#include <string>

namespace cassl {

/// A value fell outside a dimension's [min, max] range.
class RangeError : public std::out_of_range {
public:
    explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

/// Mismatched container shapes (design rows vs outputs, feature lengths, ...).
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid parameter value (epsilon outside [0,1], empty subset, ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// All outputs equal: variance-based indices are undefined.
class DegenerateVarianceError : public std::runtime_error {
public:
    explicit DegenerateVarianceError(const std::string& what) : std::runtime_error(what) {}
};

/// Request exceeds a built-in capability (e.g. Sobol table size).
class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation requires state that has not been established (untrained model, ...).
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace cassl
