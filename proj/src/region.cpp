#include "zono/region.hpp"

#include <cmath>

#include <json.hpp>

#include "zono/linprog.hpp"
#include "zono/quadprog.hpp"

namespace zono {

using json = nlohmann::ordered_json;

namespace {

// Design matrix over the flattened variables [vec(W), c?]: within the region,
// prediction_i = sum_j v_j a_ji (W_j . xbar_i) + c.
Eigen::MatrixXd design_matrix(const RegionProblem& problem, const Eigen::MatrixXd& cols) {
    const int m = problem.pattern.m;
    const int n = problem.pattern.n;
    const int p = static_cast<int>(cols.rows());
    const int vars = m * p + (problem.fit_output_bias ? 1 : 0);
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, vars);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (problem.pattern.at(j, i))
                phi.block(i, j * p, 1, p) = problem.v(j) * cols.col(i).transpose();
        }
        if (problem.fit_output_bias) phi(i, vars - 1) = 1.0;
    }
    return phi;
}

// Sign constraints (2a - 1) (W_j . xbar_i) >= 0, row-normalized.
Eigen::MatrixXd constraint_matrix(const RegionProblem& problem, const Eigen::MatrixXd& cols) {
    const int m = problem.pattern.m;
    const int n = problem.pattern.n;
    const int p = static_cast<int>(cols.rows());
    const int vars = m * p + (problem.fit_output_bias ? 1 : 0);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m * n, vars);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
            double sign = problem.pattern.at(j, i) ? 1.0 : -1.0;
            double norm = cols.col(i).norm();
            g.block(j * n + i, j * p, 1, p) =
                sign * cols.col(i).transpose() / (norm > 0.0 ? norm : 1.0);
        }
    }
    return g;
}

Eigen::VectorXd warm_start(const RegionProblem& problem, const Dataset& dataset,
                           const RegionOptions& opts, int p, int vars) {
    const int m = problem.pattern.m;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(vars);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd w;
        if (static_cast<int>(opts.witnesses.size()) == m && opts.witnesses[j].size() == p) {
            w = opts.witnesses[j];
        } else {
            RowFeasibility f = row_feasible(problem.pattern.row(j), dataset);
            if (!f.feasible)
                throw Infeasible("region pattern row is infeasible (upstream bug)");
            w = *f.witness;
        }
        x0.segment(j * p, p) = w;
    }
    return x0;
}

ShallowReluNet unpack(const RegionProblem& problem, const Eigen::VectorXd& x, int p) {
    const int m = problem.pattern.m;
    ShallowReluNet net;
    net.use_bias = problem.dataset->use_bias;
    net.W.resize(m, p);
    for (int j = 0; j < m; ++j) net.W.row(j) = x.segment(j * p, p).transpose();
    net.v = problem.v;
    net.c = problem.fit_output_bias ? x(m * p) : 0.0;
    return net;
}

}  // namespace

RegionSolution solve_region(const RegionProblem& problem, const RegionOptions& opts) {
    const Dataset& dataset = *problem.dataset;
    dataset.validate();
    if (problem.pattern.n != dataset.n() || problem.v.size() != problem.pattern.m)
        throw InvalidInput("region problem dimensions are inconsistent");

    Eigen::MatrixXd cols = homogenize(dataset);
    const int p = static_cast<int>(cols.rows());
    const int m = problem.pattern.m;
    const auto n = dataset.n();
    const int vars = m * p + (problem.fit_output_bias ? 1 : 0);

    Eigen::MatrixXd phi = design_matrix(problem, cols);
    Eigen::MatrixXd g = constraint_matrix(problem, cols);

    RegionSolution solution;
    Eigen::VectorXd x;

    if (problem.loss_kind == Loss::Mse) {
        QpProblem qp;
        qp.Q = (2.0 / static_cast<double>(n)) * phi.transpose() * phi;
        qp.q = (-2.0 / static_cast<double>(n)) * phi.transpose() * dataset.y;
        qp.G = g;
        qp.h = Eigen::VectorXd::Zero(g.rows());
        QpOptions qopts;
        qopts.x0 = warm_start(problem, dataset, opts, p, vars);
        QpResult r = solve_qp(qp, qopts);
        x = r.x;
        solution.kkt_residual = r.kkt_residual;
        solution.iterations = r.iterations;
    } else if (problem.loss_kind == Loss::L1) {
        // Split residuals: phi (xp - xm) - rp + rm = y, constraints as rows
        // with surplus variables, everything nonnegative.
        const auto mn = g.rows();
        const int total = 2 * vars + 2 * static_cast<int>(n) + static_cast<int>(mn);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + mn, total);
        Eigen::VectorXd b(n + mn);
        a.block(0, 0, n, vars) = phi;
        a.block(0, vars, n, vars) = -phi;
        a.block(0, 2 * vars, n, n) = -Eigen::MatrixXd::Identity(n, n);
        a.block(0, 2 * vars + n, n, n) = Eigen::MatrixXd::Identity(n, n);
        b.head(n) = dataset.y;
        a.block(n, 0, mn, vars) = g;
        a.block(n, vars, mn, vars) = -g;
        a.block(n, 2 * vars + 2 * n, mn, mn) = -Eigen::MatrixXd::Identity(mn, mn);
        b.tail(mn).setZero();
        Eigen::VectorXd cost = Eigen::VectorXd::Zero(total);
        cost.segment(2 * vars, 2 * n).setConstant(1.0 / static_cast<double>(n));

        LpResult r = solve_lp_standard(a, b, cost);
        if (r.status == LpStatus::Infeasible)
            throw Infeasible("L1 region LP infeasible (upstream bug)");
        if (r.status == LpStatus::Unbounded) throw SolverStall("L1 region LP unbounded");
        x = r.x.head(vars) - r.x.segment(vars, vars);
        solution.kkt_residual = std::max(0.0, -r.min_reduced_cost);
        solution.iterations = r.iterations;
    } else {
        const Eigen::VectorXd y = dataset.y;
        const double inv_n = 1.0 / static_cast<double>(n);
        SmoothObjective obj;
        obj.value = [&phi, &y, inv_n](const Eigen::VectorXd& xv) {
            Eigen::VectorXd pred = phi * xv;
            double total = 0.0;
            for (Eigen::Index i = 0; i < pred.size(); ++i)
                total += point_loss(Loss::Logistic, pred(i), y(i));
            return total * inv_n;
        };
        obj.gradient = [&phi, &y, inv_n](const Eigen::VectorXd& xv) {
            Eigen::VectorXd pred = phi * xv;
            Eigen::VectorXd gvec(pred.size());
            for (Eigen::Index i = 0; i < pred.size(); ++i)
                gvec(i) = point_loss_grad(Loss::Logistic, pred(i), y(i));
            return Eigen::VectorXd(inv_n * (phi.transpose() * gvec));
        };
        obj.hessian = [&phi, inv_n](const Eigen::VectorXd& xv) {
            Eigen::VectorXd pred = phi * xv;
            Eigen::VectorXd wvec(pred.size());
            for (Eigen::Index i = 0; i < pred.size(); ++i) {
                double s = sigmoid(pred(i));
                wvec(i) = s * (1.0 - s);
            }
            return Eigen::MatrixXd(inv_n * (phi.transpose() * wvec.asDiagonal() * phi));
        };
        Eigen::VectorXd x0 = warm_start(problem, dataset, opts, p, vars);
        QpResult r = solve_barrier(obj, g, Eigen::VectorXd::Zero(g.rows()), x0);
        x = r.x;
        solution.kkt_residual = r.kkt_residual;
        solution.iterations = r.iterations;
    }

    ShallowReluNet net = unpack(problem, x, p);
    solution.W = net.W;
    solution.c = net.c;
    solution.loss = empirical_loss(net, dataset, problem.loss_kind);
    Eigen::VectorXd margins = g * x;
    solution.max_constraint_violation = std::max(0.0, -margins.minCoeff());
    return solution;
}

AlternateResult alternate_optimize(const ActivationPattern& pattern, const Dataset& dataset,
                                   const Eigen::VectorXd& v0, Loss loss_kind, int max_rounds,
                                   double tol, const RegionOptions& opts) {
    Eigen::MatrixXd cols = homogenize(dataset);
    const auto n = dataset.n();
    const int m = pattern.m;

    AlternateResult result;
    result.v = v0;
    double prev_loss = std::numeric_limits<double>::infinity();

    RegionOptions round_opts = opts;
    for (int round = 0; round < max_rounds; ++round) {
        RegionProblem rp;
        rp.pattern = pattern;
        rp.dataset = &dataset;
        rp.v = result.v;
        rp.loss_kind = loss_kind;
        rp.fit_output_bias = true;
        RegionSolution sol = solve_region(rp, round_opts);
        result.W = sol.W;
        result.c = sol.c;
        result.loss = sol.loss;
        result.rounds = round + 1;

        // Warm start the next round from the current weights (they satisfy the
        // constraints up to tolerance; row_feasible re-derives a witness only
        // when a row sits exactly on a boundary).
        round_opts.witnesses.clear();

        // Fit (v, c) over the frozen features.
        Eigen::MatrixXd act = (sol.W * cols).cwiseMax(0.0);  // m x N
        Eigen::MatrixXd features(n, m + 1);
        features.leftCols(m) = act.transpose();
        features.col(m).setOnes();

        if (loss_kind == Loss::Mse) {
            Eigen::VectorXd vc = features.completeOrthogonalDecomposition().solve(dataset.y);
            result.v = vc.head(m);
            result.c = vc(m);
        } else if (loss_kind == Loss::L1) {
            // Minimize the mean absolute residual over (v, c) as an LP.
            const int vars = m + 1;
            const int total = 2 * vars + 2 * static_cast<int>(n);
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, total);
            a.block(0, 0, n, vars) = features;
            a.block(0, vars, n, vars) = -features;
            a.block(0, 2 * vars, n, n) = -Eigen::MatrixXd::Identity(n, n);
            a.block(0, 2 * vars + n, n, n) = Eigen::MatrixXd::Identity(n, n);
            Eigen::VectorXd cost = Eigen::VectorXd::Zero(total);
            cost.segment(2 * vars, 2 * n).setConstant(1.0 / static_cast<double>(n));
            LpResult lr = solve_lp_standard(a, dataset.y, cost);
            if (lr.status != LpStatus::Optimal) throw SolverStall("second-layer L1 fit failed");
            Eigen::VectorXd vc = lr.x.head(vars) - lr.x.segment(vars, vars);
            result.v = vc.head(m);
            result.c = vc(m);
        } else {
            SmoothObjective obj;
            const double inv_n = 1.0 / static_cast<double>(n);
            const Eigen::VectorXd& y = dataset.y;
            obj.value = [&features, &y, inv_n](const Eigen::VectorXd& xv) {
                Eigen::VectorXd pred = features * xv;
                double total = 0.0;
                for (Eigen::Index i = 0; i < pred.size(); ++i)
                    total += point_loss(Loss::Logistic, pred(i), y(i));
                return total * inv_n;
            };
            obj.gradient = [&features, &y, inv_n](const Eigen::VectorXd& xv) {
                Eigen::VectorXd pred = features * xv;
                Eigen::VectorXd gvec(pred.size());
                for (Eigen::Index i = 0; i < pred.size(); ++i)
                    gvec(i) = point_loss_grad(Loss::Logistic, pred(i), y(i));
                return Eigen::VectorXd(inv_n * (features.transpose() * gvec));
            };
            obj.hessian = [&features, inv_n](const Eigen::VectorXd& xv) {
                Eigen::VectorXd pred = features * xv;
                Eigen::VectorXd wvec(pred.size());
                for (Eigen::Index i = 0; i < pred.size(); ++i) {
                    double s = sigmoid(pred(i));
                    wvec(i) = s * (1.0 - s) + 1e-10;
                }
                return Eigen::MatrixXd(inv_n *
                                       (features.transpose() * wvec.asDiagonal() * features));
            };
            Eigen::VectorXd vc0(m + 1);
            vc0.head(m) = result.v;
            vc0(m) = result.c;
            QpResult r = solve_barrier(obj, Eigen::MatrixXd::Zero(0, m + 1), Eigen::VectorXd(), vc0);
            result.v = r.x.head(m);
            result.c = r.x(m);
        }

        ShallowReluNet net{result.W, result.v, result.c, dataset.use_bias};
        double loss = empirical_loss(net, dataset, loss_kind);
        if (loss <= result.loss) {
            result.loss = loss;
        } else {
            // Numerical hiccup in the second-layer fit: keep the region-step v.
            result.v = rp.v;
            result.c = sol.c;
        }
        if (prev_loss - result.loss < tol) break;
        prev_loss = result.loss;
    }
    return result;
}

std::string region_solution_to_json(const RegionSolution& solution) {
    json doc;
    json w = json::array();
    for (Eigen::Index j = 0; j < solution.W.rows(); ++j) {
        json r = json::array();
        for (Eigen::Index k = 0; k < solution.W.cols(); ++k) r.push_back(solution.W(j, k));
        w.push_back(std::move(r));
    }
    doc["W"] = std::move(w);
    doc["c"] = solution.c;
    doc["loss"] = solution.loss;
    doc["kkt_residual"] = solution.kkt_residual;
    doc["iterations"] = solution.iterations;
    return doc.dump();
}

}  // namespace zono
