#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "zono/arrangement.hpp"
#include "zono/dataset.hpp"
#include "zono/rng.hpp"

using namespace zono;
using namespace zono::testing;

namespace {

Dataset line_dataset() {
    // d=1 with bias, examples x = 1, 2
    Dataset ds;
    ds.use_bias = true;
    ds.x.resize(2, 1);
    ds.x << 1, 2;
    ds.y.resize(2);
    ds.y << 0, 0;
    return ds;
}

}  // namespace

TEST_CASE("pattern bit accessors and hex round trip") {
    ActivationPattern p;
    p.m = 2;
    p.n = 5;
    p.bits.assign(10, 0);
    p.set(0, 0, 1);
    p.set(1, 4, 1);
    CHECK(p.at(0, 0) == 1);
    CHECK(p.at(1, 3) == 0);
    ActivationPattern back = pattern_from_json(pattern_to_json(p));
    CHECK(back == p);
}

TEST_CASE("pattern of weights uses strict positivity") {
    Dataset ds = line_dataset();
    Eigen::MatrixXd w(2, 2);
    w << 1, -1, 1, -2;  // unit 1: x - 1 -> (0, +); unit 2: x - 2 -> (-, 0)
    ActivationPattern p = pattern_of_weights(w, ds);
    CHECK(p.at(0, 0) == 0);  // exact zero maps to 0
    CHECK(p.at(0, 1) == 1);
    CHECK(p.at(1, 0) == 0);
    CHECK(p.at(1, 1) == 0);
}

TEST_CASE("pattern of weights is invariant to positive row scaling") {
    Dataset ds = gen_synthetic(3, 2, 17);
    auto rng = make_rng(17, "scale-invariance");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd w(3, static_cast<int>(ds.p()));
    for (Eigen::Index j = 0; j < w.rows(); ++j)
        for (Eigen::Index k = 0; k < w.cols(); ++k) w(j, k) = normal(rng);
    ActivationPattern base = pattern_of_weights(w, ds);
    Eigen::MatrixXd scaled = w;
    scaled.row(0) *= 2.5;
    scaled.row(1) *= 1e-6;
    scaled.row(2) *= 731.0;
    CHECK(pattern_of_weights(scaled, ds) == base);
}

TEST_CASE("row feasibility on the two-point line") {
    Dataset ds = line_dataset();
    // (1,0) realized by w = (-1, 1.5): 0.5 > 0, -0.5 < 0
    RowFeasibility f = row_feasible({1, 0}, ds);
    REQUIRE(f.feasible);
    Eigen::VectorXd w = *f.witness;
    CHECK(w(0) * 1 + w(1) > 0);
    CHECK(w(0) * 2 + w(1) < 0);
    CHECK(row_feasible({0, 0}, ds).feasible);
    CHECK(row_feasible({0, 1}, ds).feasible);
    CHECK(row_feasible({1, 1}, ds).feasible);
}

TEST_CASE("two-point line has 4 chambers") {
    ChamberSet chambers = enumerate_chambers(line_dataset());
    CHECK(chambers.patterns.size() == 4);
    CHECK(chambers.patterns == brute_force_chambers(line_dataset()));
}

TEST_CASE("five planar points have 22 chambers") {
    // general-position N=5 in R^2 with bias -> p=3
    auto rng = make_rng(31, "five-points");
    Dataset ds;
    ds.use_bias = true;
    ds.x = gaussian_matrix(rng, 5, 2);
    ds.y = Eigen::VectorXd::Zero(5);
    REQUIRE(is_general_position(ds, 1e-9));
    ChamberSet chambers = enumerate_chambers(ds);
    CHECK(chambers.patterns.size() == 22);
    CHECK(chambers.patterns.size() == chamber_count_formula(5, 3));
    CHECK(chambers.patterns == brute_force_chambers(ds));
}

TEST_CASE("chamber enumeration matches brute force on random data") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto rng = make_rng(seed, "arr-rand");
        Dataset ds;
        ds.use_bias = seed % 2 == 0;
        const int n = 4 + static_cast<int>(seed % 4);
        const int d = ds.use_bias ? 2 : 3;
        ds.x = gaussian_matrix(rng, n, d);
        ds.y = Eigen::VectorXd::Zero(n);
        ChamberSet chambers = enumerate_chambers(ds);
        CHECK(chambers.patterns == brute_force_chambers(ds));
        // witnesses realize their patterns strictly
        Eigen::MatrixXd cols = homogenize(ds);
        for (std::size_t k = 0; k < chambers.patterns.size(); ++k) {
            for (int i = 0; i < n; ++i) {
                double pre = chambers.witnesses[k].dot(cols.col(i));
                if (chambers.patterns[k][static_cast<std::size_t>(i)])
                    CHECK(pre > 0);
                else
                    CHECK(pre < 0);
            }
        }
    }
}

TEST_CASE("chamber cap refuses oversized enumerations") {
    auto rng = make_rng(1, "cap");
    Dataset ds;
    ds.use_bias = true;
    ds.x = gaussian_matrix(rng, 12, 3);
    ds.y = Eigen::VectorXd::Zero(12);
    ArrangementOptions opts;
    opts.chamber_cap = 10;
    CHECK_THROWS_AS(enumerate_chambers(ds, opts), ComplexityRefused);
}

TEST_CASE("neighbors are the feasible one-bit flips") {
    Dataset ds = line_dataset();
    ActivationPattern p;
    p.m = 1;
    p.n = 2;
    p.bits = {0, 0};
    auto nb = neighbors(p, ds);
    REQUIRE(nb.size() == 2);
    std::vector<std::vector<std::uint8_t>> rows;
    for (const auto& q : nb) rows.push_back(q.bits);
    std::sort(rows.begin(), rows.end());
    CHECK(rows[0] == std::vector<std::uint8_t>{0, 1});
    CHECK(rows[1] == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("canonical key is invariant to within-group unit swaps") {
    ActivationPattern a;
    a.m = 2;
    a.n = 3;
    a.bits = {1, 0, 1, 0, 1, 1};
    ActivationPattern b = a;
    b.bits = {0, 1, 1, 1, 0, 1};  // rows swapped
    std::vector<std::vector<int>> one_group{{0, 1}};
    std::vector<std::vector<int>> two_groups{{0}, {1}};
    CHECK(canonical_key(a, one_group) == canonical_key(b, one_group));
    CHECK(canonical_key(a, two_groups) != canonical_key(b, two_groups));
}

TEST_CASE("stability of chamber sets under tiny perturbations") {
    Dataset ds = gen_synthetic(2, 2, 17);
    ChamberSet base = enumerate_chambers(ds);
    for (std::uint64_t s = 0; s < 20; ++s) {
        Dataset moved = perturb(ds, {1e-7, s});
        CHECK(enumerate_chambers(moved).patterns == base.patterns);
    }
}
