#ifndef ZONO_QUADPROG_HPP
#define ZONO_QUADPROG_HPP

#include <functional>

#include <Eigen/Dense>

namespace zono {

// min 1/2 x'Qx + q'x  s.t.  G x >= h, with Q positive semidefinite.
struct QpProblem {
    Eigen::MatrixXd Q;
    Eigen::VectorXd q;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
};

struct QpOptions {
    int max_iterations = 200;
    double tol = 1e-11;
    double kkt_ridge = 1e-10;  // regularization on the Newton system only
    Eigen::VectorXd x0;        // optional warm start
};

struct QpResult {
    bool optimal = false;
    Eigen::VectorXd x;
    Eigen::VectorXd z;  // multipliers for G x >= h
    int iterations = 0;
    double kkt_residual = 0.0;  // max of dual/primal residual and complementarity
};

// Primal-dual interior point with Mehrotra predictor-corrector steps.
QpResult solve_qp(const QpProblem& problem, const QpOptions& opts = {});

// Smooth convex objective given by callbacks.
struct SmoothObjective {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

struct BarrierOptions {
    double mu0 = 1.0;
    double mu_shrink = 0.2;
    double tol = 1e-9;
    int max_outer = 40;
    int max_newton = 60;
};

// Damped Newton on f(x) - mu * sum log(G x - h) along a decreasing barrier
// path. x0 must be strictly feasible.
QpResult solve_barrier(const SmoothObjective& objective, const Eigen::MatrixXd& G,
                       const Eigen::VectorXd& h, const Eigen::VectorXd& x0,
                       const BarrierOptions& opts = {});

}  // namespace zono

#endif
