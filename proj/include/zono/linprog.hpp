#ifndef ZONO_LINPROG_HPP
#define ZONO_LINPROG_HPP

#include <Eigen/Dense>

namespace zono {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
    // Most negative reduced cost over nonbasic columns at termination;
    // >= -1e-9 certifies optimality.
    double min_reduced_cost = 0.0;
};

struct LpOptions {
    int max_iterations = 20000;
    double pivot_tol = 1e-9;
    double feas_tol = 1e-9;
};

// min c^T x  s.t.  A x = b, x >= 0  (dense two-phase revised simplex with an
// explicit basis inverse; Bland's rule kicks in when the objective stalls).
LpResult solve_lp_standard(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c, const LpOptions& opts = {});

// min c^T x  s.t.  G x >= h, x free.  Free variables are split internally.
LpResult solve_lp_inequality(const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                             const Eigen::VectorXd& c, const LpOptions& opts = {});

struct InteriorPointResult {
    bool feasible = false;
    Eigen::VectorXd witness;
};

// Strict feasibility of the homogeneous cone {w : G w > 0}, decided through
// the unit-margin system G w >= 1 (phase-1 only). On success the witness
// satisfies every inequality with margin >= 1.
InteriorPointResult find_interior_point(const Eigen::MatrixXd& G, const LpOptions& opts = {});

}  // namespace zono

#endif
