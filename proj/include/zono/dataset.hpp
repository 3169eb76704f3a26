#ifndef ZONO_DATASET_HPP
#define ZONO_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zono/errors.hpp"

namespace zono {

// Training dataset: one example per row of `x`. When `use_bias` is set the
// examples act through homogeneous coordinates (a trailing 1 is appended), so
// weight vectors live in R^{d+1}; otherwise weights act on the raw d
// coordinates.
struct Dataset {
    Eigen::MatrixXd x;  // N x d
    Eigen::VectorXd y;  // N
    bool use_bias = true;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index d() const { return x.cols(); }
    Eigen::Index p() const { return use_bias ? d() + 1 : d(); }

    void validate() const;
};

struct SetCoverInstance {
    int universe_size = 0;
    std::vector<std::vector<int>> subsets;  // elements in 1..universe_size
    int t = 1;

    int num_subsets() const { return static_cast<int>(subsets.size()); }
    void validate() const;
};

struct PerturbationSpec {
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

enum class SetCoverVariant { Degenerate, AdversarialPerturbed, GeneralPosition };

struct GeneralPositionResult {
    bool general_position = false;
    bool probabilistic = false;  // true when subset sampling was used
    std::size_t subsets_checked = 0;
};

struct GeneralPositionOptions {
    double tol = 1e-9;
    std::size_t subset_cap = 1000000;  // max exhaustive subset count
    bool allow_sampling = false;       // fall back to random subsets above the cap
    std::size_t sample_count = 200000;
    std::uint64_t sample_seed = 0;
};

// Data matrix with examples as columns; (d+1) x N homogenized when use_bias,
// else the plain d x N transpose.
Eigen::MatrixXd homogenize(const Dataset& dataset);

GeneralPositionResult is_general_position(const Dataset& dataset, const GeneralPositionOptions& opts = {});
inline bool is_general_position(const Dataset& dataset, double tol) {
    GeneralPositionOptions opts;
    opts.tol = tol;
    return is_general_position(dataset, opts).general_position;
}

// Displaces every example by an independent uniform draw from the epsilon
// ball; labels unchanged.
Dataset perturb(const Dataset& dataset, const PerturbationSpec& spec);

// Teacher-labeled Gaussian data with N = (d+1) * m_gen examples.
Dataset gen_synthetic(int d, int m_gen, std::uint64_t seed);

// The 5-example collinear dataset whose optimal L1 loss jumps under an
// arbitrarily small displacement of example 3.
Dataset gen_appendix_d1(double epsilon);

// The 4-example planar bias-free dataset where the perturbed optimum lands on
// a vertex absent from the original zonotope.
Dataset gen_appendix_d2(double epsilon);

struct SetCoverDatasetOptions {
    double delta1 = 0.0;   // general-position variant noise bounds
    double delta2 = 0.0;
    double epsilon = 0.0;  // adversarial variant shift
    std::uint64_t seed = 0;
    int max_d = 64;
};

// Reduction dataset: d = M + 2 coordinates (gamma, one, one per subset),
// N = |U| + M + 2 examples, gamma = 0.01 / M^2, bias-free.
Dataset gen_set_cover_dataset(const SetCoverInstance& instance, SetCoverVariant variant,
                              const SetCoverDatasetOptions& opts);

double set_cover_gamma(const SetCoverInstance& instance);

// Weight vector certifying a cover: w_1 = 1, w_gamma = gamma, w_{T_i} = coverage_weight
// on the given cover (subset indices, 0-based), 0 elsewhere.
Eigen::VectorXd set_cover_witness_weights(const SetCoverInstance& instance,
                                          const std::vector<int>& cover, double coverage_weight);

std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& text);

std::string set_cover_instance_to_json(const SetCoverInstance& instance);
SetCoverInstance set_cover_instance_from_json(const std::string& text);

}  // namespace zono

#endif
