#include "zono/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "zono/errors.hpp"

namespace zono {

namespace {

struct Tableau {
    // Columns 0..n-1 are structural, n..n+m-1 are artificials.
    Eigen::MatrixXd a;      // m x (n + m)
    Eigen::VectorXd b;      // m, >= 0
    Eigen::MatrixXd binv;   // m x m explicit basis inverse
    Eigen::VectorXd xb;     // basic values
    std::vector<int> basis;
    int n = 0;
    int m = 0;

    void refactor() {
        Eigen::MatrixXd ab(m, m);
        for (int i = 0; i < m; ++i) ab.col(i) = a.col(basis[static_cast<std::size_t>(i)]);
        binv = ab.fullPivLu().inverse();
        xb = binv * b;
    }
};

// Runs simplex iterations with the given per-column costs until optimal.
// `allowed` masks columns permitted to enter the basis.
void run_simplex(Tableau& t, const Eigen::VectorXd& cost, const std::vector<bool>& allowed,
                 const LpOptions& opts, int& iterations, double& min_reduced_cost) {
    const int total = t.n + t.m;
    int since_improvement = 0;
    double last_obj = std::numeric_limits<double>::infinity();

    for (;; ++iterations) {
        if (iterations > opts.max_iterations) throw SolverStall("simplex iteration cap exceeded");
        if (iterations % 64 == 63) t.refactor();

        Eigen::VectorXd cb(t.m);
        for (int i = 0; i < t.m; ++i) cb(i) = cost(t.basis[static_cast<std::size_t>(i)]);
        Eigen::VectorXd y = t.binv.transpose() * cb;

        const bool bland = since_improvement > 200;
        int entering = -1;
        double best = -opts.pivot_tol;
        std::vector<bool> in_basis(static_cast<std::size_t>(total), false);
        for (int i = 0; i < t.m; ++i) in_basis[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(i)])] = true;

        min_reduced_cost = 0.0;
        for (int j = 0; j < total; ++j) {
            if (in_basis[static_cast<std::size_t>(j)] || !allowed[static_cast<std::size_t>(j)]) continue;
            double rj = cost(j) - y.dot(t.a.col(j));
            min_reduced_cost = std::min(min_reduced_cost, rj);
            if (rj < best) {
                entering = j;
                if (bland) break;  // first eligible index
                best = rj;
            } else if (bland && entering >= 0) {
                break;
            }
        }
        if (entering < 0) return;  // optimal

        Eigen::VectorXd dir = t.binv * t.a.col(entering);
        int leaving = -1;
        double min_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < t.m; ++i) {
            if (dir(i) > opts.pivot_tol) {
                double ratio = std::max(t.xb(i), 0.0) / dir(i);
                if (ratio < min_ratio - 1e-12 ||
                    (ratio < min_ratio + 1e-12 &&
                     (leaving < 0 || t.basis[static_cast<std::size_t>(i)] <
                                         t.basis[static_cast<std::size_t>(leaving)]))) {
                    min_ratio = ratio;
                    leaving = i;
                }
            }
        }
        if (leaving < 0) throw Infeasible("unbounded-marker");  // handled by callers

        // Pivot: update the explicit inverse and basic values.
        const double piv = dir(leaving);
        t.binv.row(leaving) /= piv;
        t.xb(leaving) = min_ratio;
        for (int i = 0; i < t.m; ++i) {
            if (i == leaving) continue;
            if (dir(i) != 0.0) {
                t.binv.row(i) -= dir(i) * t.binv.row(leaving);
                t.xb(i) -= dir(i) * min_ratio;
            }
        }
        t.basis[static_cast<std::size_t>(leaving)] = entering;

        double obj = 0.0;
        for (int i = 0; i < t.m; ++i) obj += cost(t.basis[static_cast<std::size_t>(i)]) * t.xb(i);
        if (obj < last_obj - 1e-12) {
            last_obj = obj;
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
    }
}

}  // namespace

LpResult solve_lp_standard(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c, const LpOptions& opts) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());

    Tableau t;
    t.n = n;
    t.m = m;
    t.a.resize(m, n + m);
    t.a.leftCols(n) = A;
    t.a.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
    t.b = b;
    for (int i = 0; i < m; ++i) {
        if (t.b(i) < 0) {
            t.b(i) = -t.b(i);
            t.a.row(i).head(n) = -t.a.row(i).head(n);
        }
    }
    t.basis.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) t.basis[static_cast<std::size_t>(i)] = n + i;
    t.binv = Eigen::MatrixXd::Identity(m, m);
    t.xb = t.b;

    LpResult result;
    std::vector<bool> allowed(static_cast<std::size_t>(n + m), true);

    // Phase 1: minimize artificial mass.
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
    phase1_cost.tail(m).setOnes();
    double min_rc = 0.0;
    try {
        run_simplex(t, phase1_cost, allowed, opts, result.iterations, min_rc);
    } catch (const Infeasible&) {
        throw SolverStall("phase-1 simplex reported an unbounded direction");
    }
    double artificial_mass = 0.0;
    for (int i = 0; i < m; ++i) {
        if (t.basis[static_cast<std::size_t>(i)] >= n) artificial_mass += std::max(t.xb(i), 0.0);
    }
    if (artificial_mass > 1e-7) {
        result.status = LpStatus::Infeasible;
        return result;
    }

    // Drive remaining zero-level artificials out of the basis where possible;
    // redundant rows keep theirs pinned at zero.
    for (int i = 0; i < m; ++i) {
        if (t.basis[static_cast<std::size_t>(i)] < n) continue;
        for (int j = 0; j < n; ++j) {
            double elem = t.binv.row(i).dot(t.a.col(j));
            if (std::abs(elem) > 1e-7) {
                Eigen::VectorXd dir = t.binv * t.a.col(j);
                t.binv.row(i) /= dir(i);
                double xi = t.xb(i) / dir(i);
                for (int r = 0; r < m; ++r) {
                    if (r == i) continue;
                    if (dir(r) != 0.0) {
                        t.binv.row(r) -= dir(r) * t.binv.row(i);
                        t.xb(r) -= dir(r) * xi;
                    }
                }
                t.xb(i) = xi;
                t.basis[static_cast<std::size_t>(i)] = j;
                break;
            }
        }
    }
    for (int j = n; j < n + m; ++j) allowed[static_cast<std::size_t>(j)] = false;

    // Phase 2.
    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m);
    phase2_cost.head(n) = c;
    try {
        run_simplex(t, phase2_cost, allowed, opts, result.iterations, result.min_reduced_cost);
    } catch (const Infeasible&) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    result.status = LpStatus::Optimal;
    result.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) {
        int col = t.basis[static_cast<std::size_t>(i)];
        if (col < n) result.x(col) = t.xb(i);
    }
    result.objective = c.dot(result.x);
    return result;
}

LpResult solve_lp_inequality(const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                             const Eigen::VectorXd& c, const LpOptions& opts) {
    const int m = static_cast<int>(G.rows());
    const int n = static_cast<int>(G.cols());

    // x = xp - xm, surplus s >= 0:  G xp - G xm - s = h.
    Eigen::MatrixXd A(m, 2 * n + m);
    A.leftCols(n) = G;
    A.middleCols(n, n) = -G;
    A.rightCols(m) = -Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(2 * n + m);
    cs.head(n) = c;
    cs.segment(n, n) = -c;

    LpResult inner = solve_lp_standard(A, h, cs, opts);
    LpResult result = inner;
    if (inner.status == LpStatus::Optimal) {
        result.x = inner.x.head(n) - inner.x.segment(n, n);
        result.objective = c.dot(result.x);
    }
    return result;
}

InteriorPointResult find_interior_point(const Eigen::MatrixXd& G, const LpOptions& opts) {
    InteriorPointResult out;
    if (G.rows() == 0) {
        out.feasible = true;
        out.witness = Eigen::VectorXd::Zero(G.cols());
        return out;
    }
    LpResult lp = solve_lp_inequality(G, Eigen::VectorXd::Ones(G.rows()),
                                      Eigen::VectorXd::Zero(G.cols()), opts);
    if (lp.status == LpStatus::Optimal) {
        out.feasible = true;
        out.witness = lp.x;
    }
    return out;
}

}  // namespace zono
