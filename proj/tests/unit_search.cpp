#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "zono/search.hpp"

using namespace zono;
using namespace zono::testing;

namespace {

Eigen::VectorXd ones_v(int m) { return Eigen::VectorXd::Ones(m); }

}  // namespace

TEST_CASE("exact search recovers the known optima of the discontinuity datasets") {
    SearchResult a = exact_erm(gen_appendix_d1(0.0), 1, ones_v(1), Loss::L1, false);
    CHECK(a.loss == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(a.trace.terminal_reason == "exact_complete");
    SearchResult b = exact_erm(gen_appendix_d1(0.01), 1, ones_v(1), Loss::L1, false);
    CHECK(b.loss <= 1e-8);
    SearchResult c = exact_erm(gen_appendix_d2(0.0), 1, ones_v(1), Loss::L1, false);
    CHECK(c.loss == doctest::Approx(1.25).epsilon(1e-9));
    SearchResult d = exact_erm(gen_appendix_d2(0.1), 1, ones_v(1), Loss::L1, false);
    CHECK(d.loss == doctest::Approx(0.625).epsilon(1e-6));
}

TEST_CASE("exact search visits each unordered region assignment once") {
    Dataset ds = gen_synthetic(1, 1, 3);  // N=2
    ChamberSet chambers = enumerate_chambers(ds);
    const std::size_t k = chambers.patterns.size();
    SearchResult r = exact_erm(ds, 2, ones_v(2), Loss::Mse, true);
    // multiset pairs over k chambers for two interchangeable units
    CHECK(r.trace.steps.size() == k * (k + 1) / 2);
    std::vector<std::string> keys;
    for (const auto& s : r.trace.steps) keys.push_back(s.pattern_key);
    std::sort(keys.begin(), keys.end());
    CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());

    // mixed output weights fall back to the full product within groups
    Eigen::VectorXd v(2);
    v << 1, -1;
    SearchResult full = exact_erm(ds, 2, v, Loss::Mse, true);
    CHECK(full.trace.steps.size() == k * k);
    CHECK(full.loss <= r.loss + 1e-12);
}

TEST_CASE("exact search refuses oversized region products") {
    Dataset ds = gen_synthetic(2, 2, 1);
    ExactErmOptions opts;
    opts.region_cap = 5;
    CHECK_THROWS_AS(exact_erm(ds, 3, ones_v(3), Loss::Mse, true, opts), ComplexityRefused);
}

TEST_CASE("greedy descent decreases strictly and never beats exact") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Dataset ds = gen_synthetic(2, 1, seed);  // N=3
        Eigen::VectorXd v = pm_half_vector(2);
        SearchResult exact = exact_erm(ds, 2, v, Loss::Mse, true);
        LocalSearchOptions opts;
        opts.seed = seed;
        SearchResult greedy = gls(ds, 2, v, Loss::Mse, opts);
        CHECK(greedy.loss >= exact.loss - 1e-9);
        CHECK(greedy.loss <= greedy.trace.steps.front().loss + 1e-9);
        for (std::size_t i = 1; i < greedy.trace.steps.size(); ++i)
            CHECK(greedy.trace.steps[i].loss < greedy.trace.steps[i - 1].loss);
        CHECK(greedy.trace.terminal_reason == "local_min");
    }
}

TEST_CASE("first-improvement variant bounds its per-step work") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Dataset ds = gen_synthetic(2, 1, seed + 20);
        const int m = 3;
        Eigen::VectorXd v = pm_half_vector(m);
        LocalSearchOptions opts;
        opts.seed = seed;
        SearchResult r = mgls(ds, m, v, Loss::Mse, opts);
        for (const auto& s : r.trace.steps)
            CHECK(s.qp_solves <= m * static_cast<int>(ds.n()) + 1);
        for (std::size_t i = 1; i < r.trace.steps.size(); ++i)
            CHECK(r.trace.steps[i].loss < r.trace.steps[i - 1].loss);
        // deterministic for a fixed seed
        SearchResult again = mgls(ds, m, v, Loss::Mse, opts);
        CHECK(again.loss == r.loss);
        CHECK(again.best_pattern == r.best_pattern);
    }
}

TEST_CASE("random vertices are feasible and reproducible") {
    Dataset ds = gen_synthetic(3, 2, 2);
    ActivationPattern p1 = random_vertex(ds, 4, 9);
    ActivationPattern p2 = random_vertex(ds, 4, 9);
    CHECK(p1 == p2);
    CHECK(!(random_vertex(ds, 4, 10) == p1));
    for (int j = 0; j < p1.m; ++j) CHECK(row_feasible(p1.row(j), ds).feasible);
}

TEST_CASE("chunked fit interpolates with the promised unit budget") {
    Dataset ds = gen_synthetic(4, 2, 13);  // N=10, chunks of 5 -> 4 units
    ChunkedFitResult r = chunked_fit(ds);
    const int expected_units = 2 * ((static_cast<int>(ds.n()) + 4) / 5);
    CHECK(r.net.m() == expected_units);
    CHECK(r.max_residual < 1e-6 * (1.0 + ds.y.cwiseAbs().maxCoeff()));
    // output weights alternate +1 / -1
    for (Eigen::Index j = 0; j < r.net.m(); ++j)
        CHECK(r.net.v(j) == (j % 2 == 0 ? 1.0 : -1.0));
    // examples are chunked in sorted coordinate-d order
    for (std::size_t s = 1; s < r.plan.order.size(); ++s)
        CHECK(ds.x(r.plan.order[s - 1], 3) <= ds.x(r.plan.order[s], 3));
}

TEST_CASE("chunked fit progress invariant: each prefix fits its chunks") {
    Dataset ds = gen_synthetic(2, 3, 21);  // N=9, 3 chunks
    ChunkedFitResult r = chunked_fit(ds);
    for (std::size_t k = 0; k < r.plan.chunk_bounds.size(); ++k) {
        ShallowReluNet prefix = r.net;
        prefix.W = r.net.W.topRows(2 * static_cast<Eigen::Index>(k + 1));
        prefix.v = r.net.v.head(2 * static_cast<Eigen::Index>(k + 1));
        for (std::size_t c = 0; c <= k; ++c) {
            auto [start, end] = r.plan.chunk_bounds[c];
            for (int s = start; s < end; ++s) {
                int idx = r.plan.order[static_cast<std::size_t>(s)];
                CHECK(forward(prefix, ds.x.row(idx).transpose()) ==
                      doctest::Approx(ds.y(idx)).epsilon(1e-8).scale(1.0 + std::abs(ds.y(idx))));
            }
        }
    }
}

TEST_CASE("chunked fit rejects ties on the split coordinate") {
    Dataset ds;
    ds.use_bias = true;
    ds.x.resize(4, 1);
    ds.x << 0, 1, 1, 2;  // the chunk boundary falls between two equal values
    ds.y.resize(4);
    ds.y << 1, 2, 3, 4;
    CHECK_THROWS_AS(chunked_fit(ds), BoundaryTie);
}

TEST_CASE("set-cover threshold equivalence needs every element coverable") {
    // When some universe element belongs to no subset, the noisy variant of
    // the reduction dataset admits a loss below the no-cover threshold: large
    // weights with canceling coordinates exploit the per-example noise to
    // deactivate the uncoverable element while sacrificing only two
    // gamma-labeled examples. Coverable instances do not show this.
    SetCoverInstance inst;
    inst.universe_size = 3;
    inst.subsets = {{1}, {2}, {1, 2}};  // element 3 is in no subset
    inst.t = 1;
    double gamma = set_cover_gamma(inst);
    SetCoverDatasetOptions opts;
    opts.delta1 = 0.01;
    opts.delta2 = 0.02;
    int exploited = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        opts.seed = seed;
        Dataset ds = gen_set_cover_dataset(inst, SetCoverVariant::GeneralPosition, opts);
        ExactErmOptions eopts;
        eopts.region_cap = 5000;
        double loss =
            exact_erm(ds, 1, Eigen::VectorXd::Ones(1), Loss::Mse, false, eopts).loss;
        if (loss <= 2.5 * gamma * gamma / static_cast<double>(ds.n())) ++exploited;
    }
    CHECK(exploited >= 2);
}

TEST_CASE("search result serialization carries the trace") {
    Dataset ds = gen_appendix_d1(0.0);
    SearchResult r = exact_erm(ds, 1, ones_v(1), Loss::L1, false);
    std::string text = search_result_to_json(r);
    CHECK(text.find("\"terminal_reason\":\"exact_complete\"") != std::string::npos);
    CHECK(text.find("\"best_loss\"") != std::string::npos);
    CHECK(text.find("\"qp_solves\"") != std::string::npos);
}
