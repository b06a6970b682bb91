#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "cassl/errors.hpp"
#include "cassl/sobol.hpp"

namespace cassl {

/// Block identity of a design row.
enum class DesignBlock { A, AB, BA, B };

/// Saltelli cross-sampling design: matrices A and B drawn from the two
/// K-column halves of a 2K-dimensional Sobol stream, plus the column-swapped
/// cross matrices AB_i (and BA_i when second-order estimation is enabled).
/// Row order: A block, AB_1..AB_K, (BA_1..BA_K,) B block. Immutable.
class SaltelliDesign {
public:
    SaltelliDesign(int dimension, std::size_t base_count, bool second_order)
        : k_(dimension), n_(base_count), second_order_(second_order) {
        if (dimension < 1) throw ParameterError("saltelli_design: dimension must be >= 1");
        if (base_count < 2) throw ParameterError("saltelli_design: base count must be >= 2");
        auto pts = sobol_points(2 * dimension, base_count);
        const std::size_t K = static_cast<std::size_t>(dimension);
        std::vector<std::vector<double>> A(n_, std::vector<double>(K));
        std::vector<std::vector<double>> B(n_, std::vector<double>(K));
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t j = 0; j < K; ++j) {
                A[r][j] = pts[r][j];
                B[r][j] = pts[r][K + j];
            }
        rows_.reserve(row_count());
        for (std::size_t r = 0; r < n_; ++r) rows_.push_back(A[r]);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t r = 0; r < n_; ++r) {
                auto row = A[r];
                row[i] = B[r][i];
                rows_.push_back(std::move(row));
            }
        if (second_order_) {
            for (std::size_t i = 0; i < K; ++i)
                for (std::size_t r = 0; r < n_; ++r) {
                    auto row = B[r];
                    row[i] = A[r][i];
                    rows_.push_back(std::move(row));
                }
        }
        for (std::size_t r = 0; r < n_; ++r) rows_.push_back(B[r]);
    }

    int dimension() const { return k_; }
    std::size_t base_count() const { return n_; }
    bool second_order() const { return second_order_; }

    std::size_t row_count() const {
        return n_ * (second_order_ ? (2 * static_cast<std::size_t>(k_) + 2)
                                   : (static_cast<std::size_t>(k_) + 2));
    }

    const std::vector<std::vector<double>>& rows() const { return rows_; }
    const std::vector<double>& row(std::size_t r) const { return rows_[r]; }

    std::size_t a_offset() const { return 0; }
    std::size_t ab_offset(int i) const { return n_ * (1 + static_cast<std::size_t>(i)); }
    std::size_t ba_offset(int i) const {
        return n_ * (1 + static_cast<std::size_t>(k_) + static_cast<std::size_t>(i));
    }
    std::size_t b_offset() const { return row_count() - n_; }

    /// Block and cross-column index (valid for AB/BA) of a row.
    std::pair<DesignBlock, int> block_of(std::size_t r) const {
        if (r < n_) return {DesignBlock::A, -1};
        if (r >= b_offset()) return {DesignBlock::B, -1};
        std::size_t block = r / n_ - 1;
        if (block < static_cast<std::size_t>(k_)) return {DesignBlock::AB, static_cast<int>(block)};
        return {DesignBlock::BA, static_cast<int>(block - static_cast<std::size_t>(k_))};
    }

    std::string block_label(std::size_t r) const {
        auto [blk, i] = block_of(r);
        switch (blk) {
            case DesignBlock::A: return "A";
            case DesignBlock::B: return "B";
            case DesignBlock::AB: return "AB" + std::to_string(i + 1);
            default: return "BA" + std::to_string(i + 1);
        }
    }

private:
    int k_;
    std::size_t n_;
    bool second_order_;
    std::vector<std::vector<double>> rows_;
};

inline SaltelliDesign saltelli_design(int dimension, std::size_t base_count, bool second_order) {
    return SaltelliDesign(dimension, base_count, second_order);
}

/// CSV export for external auditing: one row per evaluation point,
/// header = dimension names + block label.
inline void write_design_csv(std::ostream& os, const SaltelliDesign& design,
                             const std::vector<std::string>& names) {
    if (names.size() != static_cast<std::size_t>(design.dimension()))
        throw ShapeError("write_design_csv: got " + std::to_string(names.size()) + " names for " +
                         std::to_string(design.dimension()) + " dimensions");
    for (std::size_t j = 0; j < names.size(); ++j) os << names[j] << ",";
    os << "block\n";
    os.precision(17);
    for (std::size_t r = 0; r < design.row_count(); ++r) {
        for (double x : design.row(r)) os << x << ",";
        os << design.block_label(r) << "\n";
    }
}

}  // namespace cassl
