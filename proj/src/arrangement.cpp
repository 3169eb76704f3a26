#include "zono/arrangement.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "zono/linprog.hpp"

namespace zono {

using json = nlohmann::ordered_json;

ActivationPattern pattern_of_weights(const Eigen::MatrixXd& w, const Dataset& dataset) {
    Eigen::MatrixXd cols = homogenize(dataset);
    if (w.cols() != cols.rows())
        throw InvalidInput("weight width does not match dataset homogenization mode");
    ActivationPattern out;
    out.m = static_cast<int>(w.rows());
    out.n = static_cast<int>(cols.cols());
    out.bits.assign(static_cast<std::size_t>(out.m) * out.n, 0);
    Eigen::MatrixXd pre = w * cols;
    for (int j = 0; j < out.m; ++j)
        for (int i = 0; i < out.n; ++i)
            if (pre(j, i) > 0.0) out.set(j, i, 1);
    return out;
}

namespace {

// Row-normalized signed constraint matrix for one unit's sign pattern.
Eigen::MatrixXd signed_constraints(const std::vector<std::uint8_t>& row,
                                   const Eigen::MatrixXd& cols) {
    const auto n = cols.cols();
    Eigen::MatrixXd g(n, cols.rows());
    for (Eigen::Index i = 0; i < n; ++i) {
        double sign = row[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
        double norm = cols.col(i).norm();
        g.row(i) = sign * cols.col(i).transpose() / (norm > 0.0 ? norm : 1.0);
    }
    return g;
}

}  // namespace

RowFeasibility row_feasible(const std::vector<std::uint8_t>& row, const Dataset& dataset) {
    Eigen::MatrixXd cols = homogenize(dataset);
    if (static_cast<Eigen::Index>(row.size()) != cols.cols())
        throw InvalidInput("row length does not match dataset size");
    // A zero example admits no strict sign either way.
    for (Eigen::Index i = 0; i < cols.cols(); ++i) {
        if (cols.col(i).norm() == 0.0) return {};
    }
    InteriorPointResult ip = find_interior_point(signed_constraints(row, cols));
    RowFeasibility out;
    out.feasible = ip.feasible;
    if (ip.feasible) out.witness = ip.witness;
    return out;
}

ChamberSet enumerate_chambers(const Dataset& dataset, const ArrangementOptions& opts) {
    Eigen::MatrixXd cols = homogenize(dataset);
    const auto n = cols.cols();

    struct Candidate {
        std::vector<std::uint8_t> row;
        Eigen::VectorXd witness;
    };
    std::vector<Candidate> frontier;

    for (std::uint8_t b : {std::uint8_t{0}, std::uint8_t{1}}) {
        Dataset prefix{dataset.x.topRows(1), dataset.y.head(1), dataset.use_bias};
        RowFeasibility f = row_feasible({b}, prefix);
        if (f.feasible) frontier.push_back({{b}, *f.witness});
    }

    for (Eigen::Index i = 1; i < n; ++i) {
        Dataset prefix{dataset.x.topRows(i + 1), dataset.y.head(i + 1), dataset.use_bias};
        std::vector<Candidate> next;
        for (const auto& cand : frontier) {
            double margin = cand.witness.dot(cols.col(i)) / std::max(cols.col(i).norm(), 1e-300);
            double scale = std::max(cand.witness.norm(), 1e-300);
            int sure = -1;  // extension decided by the existing witness, if clear
            if (margin > 1e-9 * scale) sure = 1;
            if (margin < -1e-9 * scale) sure = 0;
            for (std::uint8_t b : {std::uint8_t{0}, std::uint8_t{1}}) {
                std::vector<std::uint8_t> row = cand.row;
                row.push_back(b);
                if (sure == static_cast<int>(b)) {
                    next.push_back({std::move(row), cand.witness});
                    continue;
                }
                RowFeasibility f = row_feasible(row, prefix);
                if (f.feasible) next.push_back({std::move(row), *f.witness});
            }
            if (next.size() > opts.chamber_cap)
                throw ComplexityRefused("chamber count exceeds cap");
        }
        frontier = std::move(next);
    }

    std::sort(frontier.begin(), frontier.end(),
              [](const Candidate& a, const Candidate& b) { return a.row < b.row; });

    ChamberSet out;
    out.patterns.reserve(frontier.size());
    out.witnesses.reserve(frontier.size());
    for (auto& cand : frontier) {
        out.patterns.push_back(std::move(cand.row));
        out.witnesses.push_back(std::move(cand.witness));
    }
    return out;
}

std::vector<ActivationPattern> neighbors(const ActivationPattern& pattern, const Dataset& dataset) {
    std::vector<ActivationPattern> out;
    std::map<std::vector<std::uint8_t>, bool> memo;
    for (int j = 0; j < pattern.m; ++j) {
        std::vector<std::uint8_t> row = pattern.row(j);
        for (int i = 0; i < pattern.n; ++i) {
            row[static_cast<std::size_t>(i)] ^= 1;
            auto it = memo.find(row);
            bool ok = (it != memo.end()) ? it->second : row_feasible(row, dataset).feasible;
            if (it == memo.end()) memo.emplace(row, ok);
            if (ok) {
                ActivationPattern nb = pattern;
                nb.set(j, i, row[static_cast<std::size_t>(i)]);
                out.push_back(std::move(nb));
            }
            row[static_cast<std::size_t>(i)] ^= 1;
        }
    }
    return out;
}

namespace {

std::string bits_hex(const std::vector<std::uint8_t>& bits) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve((bits.size() + 3) / 4);
    unsigned nibble = 0;
    int filled = 0;
    for (std::uint8_t b : bits) {
        nibble = (nibble << 1) | (b & 1u);
        if (++filled == 4) {
            out.push_back(digits[nibble]);
            nibble = 0;
            filled = 0;
        }
    }
    if (filled > 0) out.push_back(digits[nibble << (4 - filled)]);
    return out;
}

std::vector<std::uint8_t> hex_bits(const std::string& hex, std::size_t count) {
    std::vector<std::uint8_t> out;
    out.reserve(count);
    for (char c : hex) {
        int v = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
        if (v < 0) throw InvalidInput("bad hex digit in pattern");
        for (int k = 3; k >= 0 && out.size() < count; --k) out.push_back((v >> k) & 1);
    }
    if (out.size() != count) throw InvalidInput("pattern hex length mismatch");
    return out;
}

}  // namespace

std::string pattern_hex(const ActivationPattern& pattern) { return bits_hex(pattern.bits); }

std::string row_hex(const std::vector<std::uint8_t>& row) { return bits_hex(row); }

std::string canonical_key(const ActivationPattern& pattern,
                          const std::vector<std::vector<int>>& unit_groups) {
    std::vector<std::vector<std::uint8_t>> rows;
    rows.reserve(static_cast<std::size_t>(pattern.m));
    for (const auto& group : unit_groups) {
        std::vector<std::vector<std::uint8_t>> block;
        block.reserve(group.size());
        for (int j : group) block.push_back(pattern.row(j));
        std::sort(block.begin(), block.end());
        for (auto& r : block) rows.push_back(std::move(r));
    }
    std::vector<std::uint8_t> flat;
    flat.reserve(static_cast<std::size_t>(pattern.m) * pattern.n);
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return bits_hex(flat);
}

std::string pattern_to_json(const ActivationPattern& pattern) {
    json doc;
    doc["m"] = pattern.m;
    doc["n"] = pattern.n;
    doc["bits"] = pattern_hex(pattern);
    return doc.dump();
}

ActivationPattern pattern_from_json(const std::string& text) {
    json doc = json::parse(text);
    ActivationPattern out;
    out.m = doc.at("m").get<int>();
    out.n = doc.at("n").get<int>();
    out.bits = hex_bits(doc.at("bits").get<std::string>(),
                        static_cast<std::size_t>(out.m) * static_cast<std::size_t>(out.n));
    return out;
}

std::string chamber_set_to_json(const ChamberSet& chambers, int n) {
    json arr = json::array();
    for (std::size_t i = 0; i < chambers.patterns.size(); ++i) {
        json entry;
        entry["n"] = n;
        entry["bits"] = row_hex(chambers.patterns[i]);
        json w = json::array();
        for (Eigen::Index k = 0; k < chambers.witnesses[i].size(); ++k)
            w.push_back(chambers.witnesses[i](k));
        entry["witness"] = std::move(w);
        arr.push_back(std::move(entry));
    }
    return arr.dump();
}

}  // namespace zono
