#ifndef ZONO_SEARCH_HPP
#define ZONO_SEARCH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "zono/arrangement.hpp"
#include "zono/dataset.hpp"
#include "zono/losses.hpp"
#include "zono/network.hpp"
#include "zono/region.hpp"

namespace zono {

struct SearchTraceStep {
    std::string pattern_key;
    double loss = 0.0;
    int qp_solves = 0;
};

struct SearchTrace {
    std::vector<SearchTraceStep> steps;
    std::string terminal_reason;  // local_min | max_steps | exact_complete
};

struct SearchResult {
    ShallowReluNet net;
    double loss = 0.0;
    ActivationPattern best_pattern;
    SearchTrace trace;
};

struct ExactErmOptions {
    std::size_t region_cap = 1000000;  // max region solves
    ArrangementOptions arrangement;
};

// Enumerates the Cartesian product of chamber rows over the m units
// (deduplicated by within-group row permutation) and solves every region.
SearchResult exact_erm(const Dataset& dataset, int m, const Eigen::VectorXd& v, Loss loss_kind,
                       bool fit_output_bias, const ExactErmOptions& opts = {});

struct LocalSearchOptions {
    int max_steps = 1024;
    std::uint64_t seed = 0;
    bool fit_output_bias = true;
    double active_tol = 1e-6;  // mGLS boundary detection, after row normalization
};

// Best-improvement greedy descent over the 1-skeleton.
SearchResult gls(const Dataset& dataset, int m, const Eigen::VectorXd& v, Loss loss_kind,
                 const LocalSearchOptions& opts = {});

// First-improvement variant that tries boundary-crossing vertices first.
SearchResult mgls(const Dataset& dataset, int m, const Eigen::VectorXd& v, Loss loss_kind,
                  const LocalSearchOptions& opts = {});

// Activation pattern of a standard-normal weight draw (feasible by
// construction, the sample being its own witness).
ActivationPattern random_vertex(const Dataset& dataset, int m, std::uint64_t seed);

struct ChunkPlan {
    std::vector<int> order;                          // examples sorted by coordinate d
    std::vector<std::pair<int, int>> chunk_bounds;   // [start, end) into `order`
    std::vector<double> alphas;
};

struct ChunkedFitResult {
    ShallowReluNet net;  // 2 * ceil(N / (d+1)) units, alternating +1/-1 output weights
    ChunkPlan plan;
    double max_residual = 0.0;
};

// Polynomial-time exact fit: sequential per-chunk residual regression guarded
// by a separating direction along coordinate d.
ChunkedFitResult chunked_fit(const Dataset& dataset, double fit_tol = 1e-6);

std::string search_result_to_json(const SearchResult& result);

}  // namespace zono

#endif
