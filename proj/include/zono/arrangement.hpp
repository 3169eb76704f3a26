#ifndef ZONO_ARRANGEMENT_HPP
#define ZONO_ARRANGEMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zono/dataset.hpp"

namespace zono {

// Binary m x N matrix: one row per hidden unit, one column per example. Each
// row is the barcode of a zonotope vertex; the whole matrix indexes a vertex
// of the m-fold Cartesian power.
struct ActivationPattern {
    int m = 0;
    int n = 0;
    std::vector<std::uint8_t> bits;  // row-major, values 0/1

    std::uint8_t at(int row, int col) const {
        return bits[static_cast<std::size_t>(row) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(col)];
    }
    void set(int row, int col, std::uint8_t v) {
        bits[static_cast<std::size_t>(row) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(col)] = v;
    }
    std::vector<std::uint8_t> row(int j) const {
        auto begin = bits.begin() + static_cast<long>(j) * n;
        return std::vector<std::uint8_t>(begin, begin + n);
    }

    bool operator==(const ActivationPattern&) const = default;
};

// Feasible single-unit sign patterns with one strict-interior witness each.
struct ChamberSet {
    std::vector<std::vector<std::uint8_t>> patterns;  // lexicographically sorted
    std::vector<Eigen::VectorXd> witnesses;
};

struct ArrangementOptions {
    std::size_t chamber_cap = 1000000;
};

// Strict indicator pattern of W over the dataset; exact zeros map to 0.
ActivationPattern pattern_of_weights(const Eigen::MatrixXd& w, const Dataset& dataset);

struct RowFeasibility {
    bool feasible = false;
    std::optional<Eigen::VectorXd> witness;
};

// Does a weight vector exist realizing the row's strict sign pattern? Decided
// via unit-margin phase-1 LP on the homogeneous constraint cone.
RowFeasibility row_feasible(const std::vector<std::uint8_t>& row, const Dataset& dataset);

// Incremental hyperplane insertion over the examples.
ChamberSet enumerate_chambers(const Dataset& dataset, const ArrangementOptions& opts = {});

// All one-bit flips of the pattern whose flipped row remains feasible.
std::vector<ActivationPattern> neighbors(const ActivationPattern& pattern, const Dataset& dataset);

// Hex serialization of the bit matrix, row-major.
std::string pattern_hex(const ActivationPattern& pattern);
std::string row_hex(const std::vector<std::uint8_t>& row);

// Permutation-invariant key: rows are sorted lexicographically within each
// same-output-weight unit group before serialization.
std::string canonical_key(const ActivationPattern& pattern,
                          const std::vector<std::vector<int>>& unit_groups);

std::string pattern_to_json(const ActivationPattern& pattern);
ActivationPattern pattern_from_json(const std::string& text);
std::string chamber_set_to_json(const ChamberSet& chambers, int n);

}  // namespace zono

#endif
