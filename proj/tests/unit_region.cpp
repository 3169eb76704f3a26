#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "zono/region.hpp"
#include "zono/rng.hpp"
#include "zono/search.hpp"

using namespace zono;
using namespace zono::testing;

namespace {

Dataset small_dataset(std::uint64_t seed, int n, int d, bool use_bias) {
    auto rng = make_rng(seed, "region-data");
    Dataset ds;
    ds.use_bias = use_bias;
    ds.x = gaussian_matrix(rng, n, d);
    ds.y = gaussian_vector(rng, n);
    return ds;
}

RegionProblem single_unit_problem(const Dataset& ds, const std::vector<std::uint8_t>& row,
                                  Loss kind) {
    RegionProblem p;
    p.pattern.m = 1;
    p.pattern.n = static_cast<int>(ds.n());
    p.pattern.bits = row;
    p.dataset = &ds;
    p.v.resize(1);
    p.v << 1;
    p.loss_kind = kind;
    p.fit_output_bias = false;
    return p;
}

}  // namespace

TEST_CASE("region solutions match the grid oracle on single-unit problems") {
    int tested = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Dataset ds = small_dataset(seed, 4, seed % 2 ? 3 : 2, seed % 2 == 0);
        ChamberSet chambers = enumerate_chambers(ds);
        for (Loss kind : {Loss::Mse, Loss::L1}) {
            for (std::size_t k = 0; k < chambers.patterns.size(); k += 3) {
                RegionProblem p = single_unit_problem(ds, chambers.patterns[k], kind);
                RegionSolution sol = solve_region(p);
                GridOracle oracle;
                oracle.cols = homogenize(ds);
                oracle.a = chambers.patterns[k];
                oracle.y = ds.y;
                oracle.kind = kind;
                oracle.v_unit = p.v;
                double ref = oracle.solve(6.0, 25, chambers.witnesses[k]);
                CHECK(sol.loss <= ref + 1e-4 * (1.0 + ref));
                CHECK(sol.loss >= -1e-12);
                bool near_feasible = oracle.feasible(sol.W.row(0).transpose()) ||
                                     sol.max_constraint_violation <= 1e-8;
                CHECK(near_feasible);
                ++tested;
            }
        }
    }
    CHECK(tested >= 40);
}

TEST_CASE("region optimum respects constraints and reports certificates") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Dataset ds = small_dataset(seed + 50, 6, 2, true);
        ActivationPattern pat = random_vertex(ds, 2, seed);
        RegionProblem p;
        p.pattern = pat;
        p.dataset = &ds;
        p.v = pm_half_vector(2);
        p.loss_kind = seed % 2 ? Loss::L1 : Loss::Mse;
        p.fit_output_bias = true;
        RegionSolution sol = solve_region(p);
        CHECK(sol.max_constraint_violation <= 1e-8);
        CHECK(sol.kkt_residual <= 1e-6);
        // reported loss is the true loss of the returned parameters
        ShallowReluNet net{sol.W, p.v, sol.c, ds.use_bias};
        CHECK(empirical_loss(net, ds, p.loss_kind) == doctest::Approx(sol.loss).epsilon(1e-9));
    }
}

TEST_CASE("logistic region problems solve to small gradient norm") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Dataset ds = small_dataset(seed + 80, 6, 2, true);
        for (Eigen::Index i = 0; i < ds.n(); ++i) ds.y(i) = ds.y(i) > 0 ? 1.0 : 0.0;
        ActivationPattern pat = random_vertex(ds, 2, seed);
        RegionProblem p;
        p.pattern = pat;
        p.dataset = &ds;
        p.v = pm_half_vector(2);
        p.loss_kind = Loss::Logistic;
        p.fit_output_bias = true;
        RegionSolution sol = solve_region(p);
        CHECK(sol.max_constraint_violation <= 1e-8);
        CHECK(sol.kkt_residual <= 1e-6);
        CHECK(sol.loss < std::log(2.0) + 1e-9);  // no worse than the zero logit
    }
}

TEST_CASE("infeasible rows are rejected") {
    Dataset ds;
    ds.use_bias = false;
    ds.x.resize(2, 1);
    ds.x << 1, 2;  // same direction: signs must agree
    ds.y.resize(2);
    ds.y << 1, 2;
    RegionProblem p = single_unit_problem(ds, {1, 0}, Loss::Mse);
    CHECK_THROWS_AS(solve_region(p), Infeasible);
}

TEST_CASE("alternating optimization never increases the loss") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Dataset ds = small_dataset(seed + 10, 6, 2, true);
        Loss kind = seed % 3 == 0 ? Loss::Mse : seed % 3 == 1 ? Loss::L1 : Loss::Logistic;
        if (kind == Loss::Logistic)
            for (Eigen::Index i = 0; i < ds.n(); ++i) ds.y(i) = ds.y(i) > 0 ? 1.0 : 0.0;
        ActivationPattern pat = random_vertex(ds, 3, seed);
        Eigen::VectorXd v0 = pm_half_vector(3);
        AlternateResult one = alternate_optimize(pat, ds, v0, kind, 1, 1e-12);
        AlternateResult many = alternate_optimize(pat, ds, v0, kind, 8, 1e-12);
        CHECK(many.loss <= one.loss + 1e-9);
        ShallowReluNet net{many.W, many.v, many.c, ds.use_bias};
        CHECK(empirical_loss(net, ds, kind) == doctest::Approx(many.loss).epsilon(1e-8));
    }
}
