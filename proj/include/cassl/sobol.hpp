#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cassl/errors.hpp"

namespace cassl {

namespace detail {

/// Joe–Kuo direction-number table (new-joe-kuo-6.21201), dimensions 2..32.
/// poly is the full binary encoding of the primitive polynomial; m holds the
/// initial direction values m_1..m_s (s = degree of poly).
struct JoeKuoRow {
    std::uint32_t poly;
    std::array<std::uint32_t, 7> m;
};

inline constexpr int kSobolMaxDim = 32;
inline constexpr int kSobolBits = 32;

inline constexpr std::array<JoeKuoRow, 31> kJoeKuo = {{
    {3, {1, 0, 0, 0, 0, 0, 0}},          // dim 2
    {7, {1, 3, 0, 0, 0, 0, 0}},          // dim 3
    {11, {1, 3, 1, 0, 0, 0, 0}},         // dim 4
    {13, {1, 1, 1, 0, 0, 0, 0}},         // dim 5
    {19, {1, 1, 3, 3, 0, 0, 0}},         // dim 6
    {25, {1, 3, 5, 13, 0, 0, 0}},        // dim 7
    {37, {1, 1, 5, 5, 17, 0, 0}},        // dim 8
    {41, {1, 1, 5, 5, 5, 0, 0}},         // dim 9
    {47, {1, 1, 7, 11, 19, 0, 0}},       // dim 10
    {55, {1, 1, 5, 1, 1, 0, 0}},         // dim 11
    {59, {1, 1, 1, 3, 11, 0, 0}},        // dim 12
    {61, {1, 3, 5, 5, 31, 0, 0}},        // dim 13
    {67, {1, 3, 3, 9, 7, 49, 0}},        // dim 14
    {91, {1, 1, 1, 15, 21, 21, 0}},      // dim 15
    {97, {1, 3, 1, 13, 27, 49, 0}},      // dim 16
    {103, {1, 1, 1, 15, 7, 5, 0}},       // dim 17
    {109, {1, 3, 1, 15, 13, 25, 0}},     // dim 18
    {115, {1, 1, 5, 5, 19, 61, 0}},      // dim 19
    {131, {1, 3, 7, 11, 23, 15, 103}},   // dim 20
    {137, {1, 3, 7, 13, 13, 15, 69}},    // dim 21
    {143, {1, 1, 3, 13, 7, 35, 63}},     // dim 22
    {145, {1, 3, 5, 9, 1, 25, 53}},      // dim 23
    {157, {1, 3, 1, 13, 9, 35, 107}},    // dim 24
    {167, {1, 3, 1, 5, 27, 61, 31}},     // dim 25
    {171, {1, 1, 5, 11, 19, 41, 61}},    // dim 26
    {185, {1, 3, 5, 3, 3, 13, 69}},      // dim 27
    {191, {1, 1, 7, 13, 1, 19, 1}},      // dim 28
    {193, {1, 3, 7, 5, 13, 19, 59}},     // dim 29
    {203, {1, 1, 3, 9, 25, 29, 41}},     // dim 30
    {211, {1, 3, 5, 13, 23, 1, 55}},     // dim 31
    {213, {1, 3, 7, 3, 13, 59, 17}},     // dim 32
}};

/// Direction numbers v_1..v_kSobolBits for a 0-based dimension index.
inline std::vector<std::uint64_t> sobol_directions(int dim_index) {
    std::vector<std::uint64_t> v(kSobolBits + 1, 0);
    if (dim_index == 0) {
        for (int k = 1; k <= kSobolBits; ++k) v[k] = std::uint64_t{1} << (kSobolBits - k);
        return v;
    }
    const JoeKuoRow& row = kJoeKuo[static_cast<std::size_t>(dim_index - 1)];
    int s = 0;
    for (std::uint32_t p = row.poly; p > 1; p >>= 1) ++s;
    const std::uint32_t a = (row.poly - (std::uint32_t{1} << s) - 1u) >> 1;
    std::vector<std::uint64_t> m(kSobolBits + 1, 0);
    for (int k = 1; k <= s; ++k) m[k] = row.m[static_cast<std::size_t>(k - 1)];
    for (int k = s + 1; k <= kSobolBits; ++k) {
        m[k] = m[k - s] ^ (m[k - s] << s);
        for (int i = 1; i < s; ++i)
            if ((a >> (s - 1 - i)) & 1u) m[k] ^= m[k - i] << i;
    }
    for (int k = 1; k <= kSobolBits; ++k) v[k] = m[k] << (kSobolBits - k);
    return v;
}

}  // namespace detail

/// Gray-code Sobol sequence generator. Deterministic: the same dimension
/// always yields the same sequence, starting at the all-zeros point.
/// Single-owner mutable (holds the point counter); not thread-safe.
class SobolStream {
public:
    explicit SobolStream(int dimension, std::uint64_t skip = 0) : dimension_(dimension) {
        if (dimension < 1) throw ParameterError("SobolStream: dimension must be >= 1");
        if (dimension > detail::kSobolMaxDim)
            throw CapabilityError("SobolStream: dimension " + std::to_string(dimension) +
                                  " exceeds direction-number table size " +
                                  std::to_string(detail::kSobolMaxDim));
        directions_.reserve(static_cast<std::size_t>(dimension));
        for (int j = 0; j < dimension; ++j) directions_.push_back(detail::sobol_directions(j));
        state_.assign(static_cast<std::size_t>(dimension), 0);
        for (std::uint64_t i = 0; i < skip; ++i) advance();
    }

    int dimension() const { return dimension_; }
    std::uint64_t index() const { return index_; }

    std::vector<double> next() {
        std::vector<double> p(static_cast<std::size_t>(dimension_));
        advance();
        for (int j = 0; j < dimension_; ++j)
            p[static_cast<std::size_t>(j)] = static_cast<double>(state_[static_cast<std::size_t>(j)]) * 0x1.0p-32;
        return p;
    }

private:
    void advance() {
        if (index_ == 0) {
            // first point is the origin
            index_ = 1;
            return;
        }
        std::uint64_t m = index_ - 1;
        int c = 1;
        while (m & 1u) {
            m >>= 1;
            ++c;
        }
        for (int j = 0; j < dimension_; ++j)
            state_[static_cast<std::size_t>(j)] ^= directions_[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
        ++index_;
    }

    int dimension_;
    std::uint64_t index_ = 0;
    std::vector<std::vector<std::uint64_t>> directions_;
    std::vector<std::uint64_t> state_;
};

/// First `count` points of the Sobol sequence in [0,1)^dimension.
inline std::vector<std::vector<double>> sobol_points(int dimension, std::size_t count,
                                                     std::uint64_t skip = 0) {
    if (count < 1) throw ParameterError("sobol_points: count must be >= 1");
    SobolStream stream(dimension, skip);
    std::vector<std::vector<double>> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pts.push_back(stream.next());
    return pts;
}

}  // namespace cassl
