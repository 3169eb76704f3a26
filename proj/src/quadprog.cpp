#include "zono/quadprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "zono/errors.hpp"

namespace zono {

namespace {

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double frac) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) alpha = std::min(alpha, -frac * v(i) / dv(i));
    }
    return alpha;
}

Eigen::LLT<Eigen::MatrixXd> factor_with_ridge(Eigen::MatrixXd m, double ridge) {
    for (int attempt = 0; attempt < 12; ++attempt) {
        Eigen::MatrixXd reg = m + ridge * Eigen::MatrixXd::Identity(m.rows(), m.cols());
        Eigen::LLT<Eigen::MatrixXd> llt(reg);
        if (llt.info() == Eigen::Success) return llt;
        ridge *= 100.0;
    }
    throw SolverStall("KKT system not positive definite even after regularization");
}

}  // namespace

QpResult solve_qp(const QpProblem& problem, const QpOptions& opts) {
    const auto n = problem.Q.rows();
    const auto mc = problem.G.rows();

    QpResult result;
    if (mc == 0) {
        // Unconstrained quadratic.
        Eigen::LLT<Eigen::MatrixXd> llt = factor_with_ridge(problem.Q, opts.kkt_ridge);
        result.x = llt.solve(-problem.q);
        result.z.resize(0);
        result.optimal = true;
        result.kkt_residual = (problem.Q * result.x + problem.q).lpNorm<Eigen::Infinity>();
        return result;
    }

    Eigen::VectorXd x = (opts.x0.size() == n) ? opts.x0 : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd s = (problem.G * x - problem.h).cwiseMax(1.0);
    Eigen::VectorXd z = Eigen::VectorXd::Ones(mc);

    const double scale = 1.0 + std::max({problem.q.lpNorm<Eigen::Infinity>(),
                                         problem.h.lpNorm<Eigen::Infinity>(),
                                         problem.Q.lpNorm<Eigen::Infinity>()});

    double best_residual = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = x;
    Eigen::VectorXd best_z = z;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        Eigen::VectorXd rd = problem.Q * x + problem.q - problem.G.transpose() * z;
        Eigen::VectorXd rp = problem.G * x - s - problem.h;
        double mu = s.dot(z) / static_cast<double>(mc);
        double residual = std::max({rd.lpNorm<Eigen::Infinity>(), rp.lpNorm<Eigen::Infinity>(), mu});

        if (residual < best_residual) {
            best_residual = residual;
            best_x = x;
            best_z = z;
        }
        result.iterations = iter;
        if (residual <= opts.tol * scale) break;

        // clamp the scaling weights: on dual-degenerate problems s can
        // underflow and w would poison the KKT matrix with infinities
        Eigen::VectorXd w =
            z.cwiseQuotient(s.cwiseMax(1e-280)).cwiseMin(1e14).cwiseMax(0.0);
        Eigen::MatrixXd kkt = problem.Q + problem.G.transpose() * w.asDiagonal() * problem.G;
        if (!kkt.allFinite()) break;
        Eigen::LLT<Eigen::MatrixXd> llt;
        try {
            llt = factor_with_ridge(kkt, opts.kkt_ridge);
        } catch (const SolverStall&) {
            break;  // keep the best iterate found so far
        }

        auto solve_step = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dx, Eigen::VectorXd& ds,
                              Eigen::VectorXd& dz) {
            Eigen::VectorXd rhs = -rd - problem.G.transpose() * (w.cwiseProduct(rp)) +
                                  problem.G.transpose() * (rc.cwiseQuotient(s));
            dx = llt.solve(rhs);
            ds = problem.G * dx + rp;
            dz = (rc - z.cwiseProduct(ds)).cwiseQuotient(s);
        };

        // Predictor.
        Eigen::VectorXd rc_aff = -s.cwiseProduct(z);
        Eigen::VectorXd dx_aff, ds_aff, dz_aff;
        solve_step(rc_aff, dx_aff, ds_aff, dz_aff);
        double ap = max_step(s, ds_aff, 1.0);
        double ad = max_step(z, dz_aff, 1.0);
        double mu_aff = (s + ap * ds_aff).dot(z + ad * dz_aff) / static_cast<double>(mc);
        double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Corrector.
        Eigen::VectorXd rc = -s.cwiseProduct(z) - ds_aff.cwiseProduct(dz_aff) +
                             Eigen::VectorXd::Constant(mc, sigma * mu);
        Eigen::VectorXd dx, ds, dz;
        solve_step(rc, dx, ds, dz);
        if (!dx.allFinite() || !ds.allFinite() || !dz.allFinite()) break;

        double frac = (mu > 1e-8) ? 0.995 : 0.9999;
        double alpha_p = max_step(s, ds, frac);
        double alpha_d = max_step(z, dz, frac);
        x += alpha_p * dx;
        s += alpha_p * ds;
        z += alpha_d * dz;
    }

    result.x = best_x;
    result.z = best_z;
    result.kkt_residual = best_residual;
    result.optimal = best_residual <= 1e-7 * scale;
    return result;
}

QpResult solve_barrier(const SmoothObjective& objective, const Eigen::MatrixXd& G,
                       const Eigen::VectorXd& h, const Eigen::VectorXd& x0,
                       const BarrierOptions& opts) {
    const auto mc = G.rows();
    Eigen::VectorXd x = x0;
    if (mc > 0 && ((G * x - h).minCoeff() <= 0.0))
        throw Infeasible("barrier start point is not strictly feasible");

    QpResult result;
    double mu = opts.mu0;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        for (int inner = 0; inner < opts.max_newton; ++inner) {
            Eigen::VectorXd s = (mc > 0) ? Eigen::VectorXd(G * x - h) : Eigen::VectorXd();
            Eigen::VectorXd grad = objective.gradient(x);
            Eigen::MatrixXd hess = objective.hessian(x);
            if (mc > 0) {
                Eigen::VectorXd inv_s = s.cwiseInverse();
                grad -= mu * (G.transpose() * inv_s);
                hess += mu * (G.transpose() * inv_s.cwiseAbs2().asDiagonal() * G);
            }
            Eigen::LLT<Eigen::MatrixXd> llt = factor_with_ridge(hess, 1e-12);
            Eigen::VectorXd step = llt.solve(-grad);
            double decrement = -grad.dot(step);
            if (decrement < 1e-16) break;

            // Backtracking line search staying inside the domain.
            double alpha = 1.0;
            if (mc > 0) {
                Eigen::VectorXd gs = G * step;
                for (Eigen::Index i = 0; i < mc; ++i) {
                    if (gs(i) < 0.0) alpha = std::min(alpha, -0.99 * s(i) / gs(i));
                }
            }
            double f0 = objective.value(x);
            if (mc > 0) f0 -= mu * s.array().log().sum();
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt) {
                Eigen::VectorXd xn = x + alpha * step;
                double fn = objective.value(xn);
                if (mc > 0) {
                    Eigen::VectorXd sn = G * xn - h;
                    if (sn.minCoeff() <= 0.0) {
                        alpha *= 0.5;
                        continue;
                    }
                    fn -= mu * sn.array().log().sum();
                }
                if (fn <= f0 - 1e-4 * alpha * decrement) {
                    x = xn;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            ++result.iterations;
            if (!accepted) break;
        }
        if (mu * static_cast<double>(std::max<Eigen::Index>(mc, 1)) < opts.tol) break;
        mu *= opts.mu_shrink;
    }

    result.x = x;
    if (mc > 0) {
        Eigen::VectorXd s = G * x - h;
        result.z = mu * s.cwiseInverse();
        double stationarity =
            (objective.gradient(x) - G.transpose() * result.z).lpNorm<Eigen::Infinity>();
        result.kkt_residual = std::max(stationarity, mu * static_cast<double>(mc));
    } else {
        result.z.resize(0);
        result.kkt_residual = objective.gradient(x).lpNorm<Eigen::Infinity>();
    }
    result.optimal = true;
    return result;
}

}  // namespace zono
