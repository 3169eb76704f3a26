#ifndef ZONO_TEST_HELPERS_HPP
#define ZONO_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "zono/arrangement.hpp"
#include "zono/dataset.hpp"
#include "zono/losses.hpp"
#include "zono/network.hpp"

namespace zono::testing {

// Independent chamber oracle: test every sign row of {0,1}^N for feasibility.
inline std::vector<std::vector<std::uint8_t>> brute_force_chambers(const Dataset& dataset) {
    const int n = static_cast<int>(dataset.n());
    std::vector<std::vector<std::uint8_t>> out;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::uint8_t> row(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
        if (row_feasible(row, dataset).feasible) out.push_back(std::move(row));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Chamber count of N central hyperplanes in general position in R^p.
inline std::size_t chamber_count_formula(int n, int p) {
    if (n == 0) return 1;
    auto binom = [](int a, int b) -> double {
        if (b < 0 || b > a) return 0.0;
        double r = 1.0;
        for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
        return r;
    };
    double total = 0.0;
    for (int k = 0; k <= p - 1; ++k) total += binom(n - 1, k);
    return static_cast<std::size_t>(std::llround(2.0 * total));
}

// Independent single-unit region oracle for p <= 3 parameters: coarse grid
// over a box, keep the best pattern-feasible point, then shrink-step
// coordinate descent that never leaves the feasible cone.
struct GridOracle {
    Eigen::MatrixXd cols;         // p x N homogenized examples
    std::vector<std::uint8_t> a;  // target activation row
    Eigen::VectorXd y;
    Loss kind = Loss::Mse;
    Eigen::VectorXd v_unit;  // scalar output weight (length 1)

    bool feasible(const Eigen::VectorXd& w) const {
        for (Eigen::Index i = 0; i < cols.cols(); ++i) {
            double pre = w.dot(cols.col(i));
            double sign = a[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
            if (sign * pre < 0.0) return false;
        }
        return true;
    }

    double loss(const Eigen::VectorXd& w) const {
        double total = 0.0;
        for (Eigen::Index i = 0; i < cols.cols(); ++i) {
            double pre = std::max(0.0, w.dot(cols.col(i)));
            total += point_loss(kind, v_unit(0) * pre, y(i));
        }
        return total / static_cast<double>(cols.cols());
    }

    double solve(double box, int grid, const Eigen::VectorXd& seed) const {
        const auto p = cols.rows();
        Eigen::VectorXd best = seed;
        double best_loss = feasible(seed) ? loss(seed) : std::numeric_limits<double>::infinity();
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(p), 0);
        const Eigen::Index cells = grid;
        std::vector<Eigen::Index> counter(static_cast<std::size_t>(p), 0);
        bool done = false;
        while (!done) {
            Eigen::VectorXd w(p);
            for (Eigen::Index k = 0; k < p; ++k)
                w(k) = -box + 2.0 * box * static_cast<double>(counter[static_cast<std::size_t>(k)]) /
                                   static_cast<double>(cells - 1);
            if (feasible(w)) {
                double l = loss(w);
                if (l < best_loss) {
                    best_loss = l;
                    best = w;
                }
            }
            Eigen::Index k = 0;
            for (; k < p; ++k) {
                if (++counter[static_cast<std::size_t>(k)] < cells) break;
                counter[static_cast<std::size_t>(k)] = 0;
            }
            done = (k == p);
        }
        // Direction-set descent from the best grid point with exact line
        // minimization (the loss is convex along any ray, so golden-section
        // search applies). Random directions and face/edge tangents matter
        // because the cone optimum often sits on a face or edge no axis move
        // can slide along, possibly far outside the grid box down a narrow
        // valley.
        std::mt19937_64 prng(0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<Eigen::VectorXd> normals;
        for (Eigen::Index i = 0; i < cols.cols(); ++i) {
            double sign = a[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
            Eigen::VectorXd g = sign * cols.col(i);
            if (g.norm() > 0) normals.push_back(g / g.norm());
        }
        auto line_min = [&](const Eigen::VectorXd& dir) -> bool {
            // largest feasible move along dir (the cone clips it exactly)
            double t_hi = 1e3 * box * std::max(1.0, best.norm());
            for (Eigen::Index i = 0; i < cols.cols(); ++i) {
                double sign = a[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
                double gw = sign * best.dot(cols.col(i));
                double gd = sign * dir.dot(cols.col(i));
                if (gd < 0.0) t_hi = std::min(t_hi, std::max(0.0, -gw / gd));
            }
            if (t_hi <= 1e-18) return false;
            const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
            double lo = 0.0, hi = t_hi;
            double t1 = hi - phi * (hi - lo), t2 = lo + phi * (hi - lo);
            double f1 = loss(best + t1 * dir), f2 = loss(best + t2 * dir);
            for (int it = 0; it < 90; ++it) {
                if (f1 <= f2) {
                    hi = t2;
                    t2 = t1;
                    f2 = f1;
                    t1 = hi - phi * (hi - lo);
                    f1 = loss(best + t1 * dir);
                } else {
                    lo = t1;
                    t1 = t2;
                    f1 = f2;
                    t2 = lo + phi * (hi - lo);
                    f2 = loss(best + t2 * dir);
                }
            }
            double t = f1 <= f2 ? t1 : t2;
            Eigen::VectorXd w = best + t * dir;
            if (!feasible(w)) return false;
            double l = loss(w);
            if (l < best_loss - 1e-15) {
                best_loss = l;
                best = w;
                return true;
            }
            return false;
        };
        int stale = 0;
        for (int round = 0; round < 400 && stale < 20; ++round) {
            bool improved = false;
            std::vector<Eigen::VectorXd> dirs;
            for (Eigen::Index k = 0; k < p; ++k) {
                Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
                e(k) = 1.0;
                dirs.push_back(e);
                dirs.push_back(-e);
            }
            for (int r = 0; r < 8; ++r) {
                Eigen::VectorXd u(p);
                for (Eigen::Index k = 0; k < p; ++k) u(k) = gauss(prng);
                dirs.push_back(u / u.norm());
            }
            const std::size_t base = dirs.size();
            for (const Eigen::VectorXd& g : normals)
                for (std::size_t b = 0; b < base; ++b) {
                    Eigen::VectorXd t = dirs[b] - dirs[b].dot(g) * g;
                    if (t.norm() > 1e-12) dirs.push_back(t / t.norm());
                }
            if (p == 3)
                for (std::size_t i = 0; i < normals.size(); ++i)
                    for (std::size_t j = i + 1; j < normals.size(); ++j) {
                        Eigen::Vector3d e =
                            Eigen::Vector3d(normals[i]).cross(Eigen::Vector3d(normals[j]));
                        if (e.norm() > 1e-12) {
                            dirs.push_back(e / e.norm());
                            dirs.push_back(-e / e.norm());
                        }
                    }
            for (const Eigen::VectorXd& dir : dirs) improved = line_min(dir) || improved;
            stale = improved ? 0 : stale + 1;
        }
        return best_loss;
    }
};

// Exhaustive set-cover decision: does a subcollection of size <= t cover U?
inline bool brute_force_cover(const SetCoverInstance& inst, int t) {
    const int m = inst.num_subsets();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<int>(__builtin_popcount(mask)) > t) continue;
        std::vector<bool> hit(static_cast<std::size_t>(inst.universe_size) + 1, false);
        for (int s = 0; s < m; ++s)
            if ((mask >> s) & 1u)
                for (int e : inst.subsets[static_cast<std::size_t>(s)])
                    hit[static_cast<std::size_t>(e)] = true;
        bool all = true;
        for (int e = 1; e <= inst.universe_size; ++e) all = all && hit[static_cast<std::size_t>(e)];
        if (all) return true;
    }
    return false;
}

}  // namespace zono::testing

#endif
