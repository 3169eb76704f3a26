#ifndef ZONO_REGION_HPP
#define ZONO_REGION_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zono/arrangement.hpp"
#include "zono/dataset.hpp"
#include "zono/losses.hpp"
#include "zono/network.hpp"

namespace zono {

// Constrained convex subproblem for one activation pattern: within the region
// the network output is linear in W, so MSE is a QP, L1 an LP, and the
// logistic loss a smooth convex program.
struct RegionProblem {
    ActivationPattern pattern;
    const Dataset* dataset = nullptr;
    Eigen::VectorXd v;  // fixed output weights, length m
    Loss loss_kind = Loss::Mse;
    bool fit_output_bias = false;
};

struct RegionSolution {
    Eigen::MatrixXd W;  // m x p
    double c = 0.0;
    double loss = 0.0;                      // re-evaluated at (W, c)
    double max_constraint_violation = 0.0;  // after row normalization
    double kkt_residual = 0.0;
    int iterations = 0;
};

struct RegionOptions {
    double tol_feas = 1e-8;
    // Optional strict-interior witnesses per unit row, used to warm start.
    std::vector<Eigen::VectorXd> witnesses;
};

RegionSolution solve_region(const RegionProblem& problem, const RegionOptions& opts = {});

struct AlternateResult {
    Eigen::MatrixXd W;
    Eigen::VectorXd v;
    double c = 0.0;
    double loss = 0.0;
    int rounds = 0;
};

// Block-coordinate descent: (W, c) with v fixed via solve_region, then an
// unconstrained convex fit of (v, c) over the frozen first-layer features.
AlternateResult alternate_optimize(const ActivationPattern& pattern, const Dataset& dataset,
                                   const Eigen::VectorXd& v0, Loss loss_kind, int max_rounds,
                                   double tol, const RegionOptions& opts = {});

std::string region_solution_to_json(const RegionSolution& solution);

}  // namespace zono

#endif
