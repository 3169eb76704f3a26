#include "zono/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>

#include "zono/rng.hpp"

namespace zono {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::vector<int>> sign_groups(const Eigen::VectorXd& v) {
    // Units with identical output weight are interchangeable.
    std::map<double, std::vector<int>> groups;
    for (Eigen::Index j = 0; j < v.size(); ++j) groups[v(j)].push_back(static_cast<int>(j));
    std::vector<std::vector<int>> out;
    out.reserve(groups.size());
    for (auto& [key, idx] : groups) out.push_back(std::move(idx));
    return out;
}

RegionSolution solve_pattern(const Dataset& dataset, const ActivationPattern& pattern,
                             const Eigen::VectorXd& v, Loss loss_kind, bool fit_output_bias,
                             const std::vector<Eigen::VectorXd>& witnesses) {
    RegionProblem rp;
    rp.pattern = pattern;
    rp.dataset = &dataset;
    rp.v = v;
    rp.loss_kind = loss_kind;
    rp.fit_output_bias = fit_output_bias;
    RegionOptions opts;
    opts.witnesses = witnesses;
    return solve_region(rp, opts);
}

ShallowReluNet make_net(const Dataset& dataset, const RegionSolution& sol,
                        const Eigen::VectorXd& v) {
    return ShallowReluNet{sol.W, v, sol.c, dataset.use_bias};
}

struct Flip {
    int j = 0;
    int i = 0;
    Eigen::VectorXd witness;
};

std::vector<Flip> feasible_flips(const ActivationPattern& pattern, const Dataset& dataset) {
    std::vector<Flip> out;
    std::map<std::vector<std::uint8_t>, RowFeasibility> memo;
    for (int j = 0; j < pattern.m; ++j) {
        std::vector<std::uint8_t> row = pattern.row(j);
        for (int i = 0; i < pattern.n; ++i) {
            row[static_cast<std::size_t>(i)] ^= 1;
            auto it = memo.find(row);
            if (it == memo.end()) it = memo.emplace(row, row_feasible(row, dataset)).first;
            if (it->second.feasible) out.push_back({j, i, *it->second.witness});
            row[static_cast<std::size_t>(i)] ^= 1;
        }
    }
    return out;
}

struct SearchState {
    ActivationPattern pattern;
    std::vector<Eigen::VectorXd> witnesses;
    RegionSolution solution;
};

SearchState initial_state(const Dataset& dataset, int m, const Eigen::VectorXd& v, Loss loss_kind,
                          const LocalSearchOptions& opts) {
    auto rng = make_rng(opts.seed, "search-init");
    Eigen::MatrixXd w = gaussian_matrix(rng, m, dataset.p());
    SearchState state;
    state.pattern = pattern_of_weights(w, dataset);
    state.witnesses.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) state.witnesses.push_back(w.row(j).transpose());
    state.solution =
        solve_pattern(dataset, state.pattern, v, loss_kind, opts.fit_output_bias, state.witnesses);
    return state;
}

}  // namespace

ActivationPattern random_vertex(const Dataset& dataset, int m, std::uint64_t seed) {
    auto rng = make_rng(seed, "random-vertex");
    Eigen::MatrixXd w = gaussian_matrix(rng, m, dataset.p());
    return pattern_of_weights(w, dataset);
}

SearchResult exact_erm(const Dataset& dataset, int m, const Eigen::VectorXd& v, Loss loss_kind,
                       bool fit_output_bias, const ExactErmOptions& opts) {
    if (v.size() != m) throw InvalidInput("output weight length does not match m");
    ChamberSet chambers = enumerate_chambers(dataset, opts.arrangement);
    const std::size_t k = chambers.patterns.size();
    if (k == 0) throw InvalidInput("dataset admits no feasible activation rows");

    std::vector<std::vector<int>> groups = sign_groups(v);

    // Multiset combinations per group; count before enumerating.
    double total = 1.0;
    for (const auto& group : groups) {
        double combos = 1.0;
        for (std::size_t i = 0; i < group.size(); ++i)
            combos = combos * static_cast<double>(k + i) / static_cast<double>(i + 1);
        total *= combos;
        if (total > static_cast<double>(opts.region_cap))
            throw ComplexityRefused("region solve count exceeds cap");
    }

    SearchResult result;
    result.trace.terminal_reason = "exact_complete";
    double best = std::numeric_limits<double>::infinity();

    // Per-group non-decreasing chamber index tuples, combined across groups.
    std::vector<int> choice(static_cast<std::size_t>(m), 0);
    std::vector<std::size_t> group_of_unit(static_cast<std::size_t>(m));
    std::vector<int> slot_of_unit(static_cast<std::size_t>(m));
    std::vector<std::vector<int>> units_flat;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        for (std::size_t s = 0; s < groups[gi].size(); ++s) {
            group_of_unit[static_cast<std::size_t>(groups[gi][s])] = gi;
            slot_of_unit[static_cast<std::size_t>(groups[gi][s])] = static_cast<int>(s);
        }

    ActivationPattern pattern;
    pattern.m = m;
    pattern.n = static_cast<int>(dataset.n());
    pattern.bits.assign(static_cast<std::size_t>(m) * pattern.n, 0);
    std::vector<Eigen::VectorXd> witnesses(static_cast<std::size_t>(m));

    // Odometer over per-group sorted tuples.
    std::vector<std::vector<int>> tuples(groups.size());
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        tuples[gi].assign(groups[gi].size(), 0);

    auto assemble_and_solve = [&]() {
        for (int j = 0; j < m; ++j) {
            int chamber = tuples[group_of_unit[static_cast<std::size_t>(j)]]
                                [static_cast<std::size_t>(slot_of_unit[static_cast<std::size_t>(j)])];
            const auto& row = chambers.patterns[static_cast<std::size_t>(chamber)];
            for (int i = 0; i < pattern.n; ++i) pattern.set(j, i, row[static_cast<std::size_t>(i)]);
            witnesses[static_cast<std::size_t>(j)] = chambers.witnesses[static_cast<std::size_t>(chamber)];
        }
        RegionSolution sol = solve_pattern(dataset, pattern, v, loss_kind, fit_output_bias, witnesses);
        result.trace.steps.push_back({canonical_key(pattern, groups), sol.loss, 1});
        if (sol.loss < best) {
            best = sol.loss;
            result.net = make_net(dataset, sol, v);
            result.loss = sol.loss;
            result.best_pattern = pattern;
        }
    };

    // Advance the multi-group odometer; each group's tuple stays non-decreasing.
    std::function<void(std::size_t)> recurse = [&](std::size_t gi) {
        if (gi == groups.size()) {
            assemble_and_solve();
            return;
        }
        std::vector<int>& tuple = tuples[gi];
        std::function<void(std::size_t, int)> fill = [&](std::size_t slot, int from) {
            if (slot == tuple.size()) {
                recurse(gi + 1);
                return;
            }
            for (int c = from; c < static_cast<int>(k); ++c) {
                tuple[slot] = c;
                fill(slot + 1, c);
            }
        };
        fill(0, 0);
    };
    recurse(0);
    return result;
}

SearchResult gls(const Dataset& dataset, int m, const Eigen::VectorXd& v, Loss loss_kind,
                 const LocalSearchOptions& opts) {
    if (v.size() != m) throw InvalidInput("output weight length does not match m");
    SearchState state = initial_state(dataset, m, v, loss_kind, opts);

    SearchResult result;
    result.trace.steps.push_back({pattern_hex(state.pattern), state.solution.loss, 1});
    result.trace.terminal_reason = "local_min";

    for (int step = 0; step < opts.max_steps; ++step) {
        std::vector<Flip> flips = feasible_flips(state.pattern, dataset);
        int qp_solves = 0;
        double best_loss = state.solution.loss;
        int best_idx = -1;
        RegionSolution best_sol;
        std::vector<std::uint8_t> best_bits;
        for (std::size_t f = 0; f < flips.size(); ++f) {
            ActivationPattern nb = state.pattern;
            nb.set(flips[f].j, flips[f].i, nb.at(flips[f].j, flips[f].i) ^ 1);
            std::vector<Eigen::VectorXd> wit = state.witnesses;
            wit[static_cast<std::size_t>(flips[f].j)] = flips[f].witness;
            RegionSolution sol = solve_pattern(dataset, nb, v, loss_kind, opts.fit_output_bias, wit);
            ++qp_solves;
            if (sol.loss < best_loss ||
                (best_idx >= 0 && sol.loss == best_loss && nb.bits < best_bits)) {
                best_loss = sol.loss;
                best_idx = static_cast<int>(f);
                best_sol = sol;
                best_bits = nb.bits;
            }
        }
        if (best_idx < 0) {
            result.trace.terminal_reason = "local_min";
            break;
        }
        const Flip& f = flips[static_cast<std::size_t>(best_idx)];
        state.pattern.set(f.j, f.i, state.pattern.at(f.j, f.i) ^ 1);
        state.witnesses[static_cast<std::size_t>(f.j)] = f.witness;
        state.solution = best_sol;
        result.trace.steps.push_back({pattern_hex(state.pattern), best_loss, qp_solves});
        if (step + 1 == opts.max_steps) result.trace.terminal_reason = "max_steps";
    }

    result.net = make_net(dataset, state.solution, v);
    result.loss = state.solution.loss;
    result.best_pattern = state.pattern;
    return result;
}

SearchResult mgls(const Dataset& dataset, int m, const Eigen::VectorXd& v, Loss loss_kind,
                  const LocalSearchOptions& opts) {
    if (v.size() != m) throw InvalidInput("output weight length does not match m");
    SearchState state = initial_state(dataset, m, v, loss_kind, opts);
    Eigen::MatrixXd cols = homogenize(dataset);
    auto order_rng = make_rng(opts.seed, "mgls-order");

    SearchResult result;
    result.trace.steps.push_back({pattern_hex(state.pattern), state.solution.loss, 1});
    result.trace.terminal_reason = "local_min";

    const int n = state.pattern.n;
    for (int step = 0; step < opts.max_steps; ++step) {
        // Constraints active (equalities) at the current region optimum.
        std::vector<std::pair<int, int>> active;
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < n; ++i) {
                double norm = cols.col(i).norm();
                double margin = state.solution.W.row(j).dot(cols.col(i)) / (norm > 0 ? norm : 1.0);
                if (std::abs(margin) <= opts.active_tol) active.emplace_back(j, i);
            }
        }

        // Candidate vertices: the all-flipped vertex first, then single flips
        // of active bits, then the remaining neighbors in random order.
        struct Candidate {
            ActivationPattern pattern;
            std::vector<Eigen::VectorXd> witnesses;
        };
        std::vector<Candidate> candidates;

        if (!active.empty()) {
            ActivationPattern flipped = state.pattern;
            for (auto [j, i] : active) flipped.set(j, i, flipped.at(j, i) ^ 1);
            std::vector<Eigen::VectorXd> wit = state.witnesses;
            bool ok = true;
            for (int j = 0; j < m && ok; ++j) {
                if (flipped.row(j) == state.pattern.row(j)) continue;
                RowFeasibility f = row_feasible(flipped.row(j), dataset);
                if (!f.feasible)
                    ok = false;
                else
                    wit[static_cast<std::size_t>(j)] = *f.witness;
            }
            if (ok && !(flipped == state.pattern)) candidates.push_back({flipped, wit});
        }

        std::vector<Flip> flips = feasible_flips(state.pattern, dataset);
        auto is_active = [&](const Flip& f) {
            return std::find(active.begin(), active.end(), std::make_pair(f.j, f.i)) != active.end();
        };
        std::vector<const Flip*> primary, secondary;
        for (const auto& f : flips) (is_active(f) ? primary : secondary).push_back(&f);
        std::shuffle(secondary.begin(), secondary.end(), order_rng);
        for (const Flip* f : primary) {
            Candidate c{state.pattern, state.witnesses};
            c.pattern.set(f->j, f->i, c.pattern.at(f->j, f->i) ^ 1);
            c.witnesses[static_cast<std::size_t>(f->j)] = f->witness;
            candidates.push_back(std::move(c));
        }
        for (const Flip* f : secondary) {
            Candidate c{state.pattern, state.witnesses};
            c.pattern.set(f->j, f->i, c.pattern.at(f->j, f->i) ^ 1);
            c.witnesses[static_cast<std::size_t>(f->j)] = f->witness;
            candidates.push_back(std::move(c));
        }

        int qp_solves = 0;
        bool moved = false;
        for (auto& cand : candidates) {
            RegionSolution sol =
                solve_pattern(dataset, cand.pattern, v, loss_kind, opts.fit_output_bias, cand.witnesses);
            ++qp_solves;
            if (sol.loss < state.solution.loss) {
                state.pattern = cand.pattern;
                state.witnesses = cand.witnesses;
                state.solution = sol;
                moved = true;
                break;
            }
        }
        if (!moved) {
            result.trace.terminal_reason = "local_min";
            break;
        }
        result.trace.steps.push_back({pattern_hex(state.pattern), state.solution.loss, qp_solves});
        if (step + 1 == opts.max_steps) result.trace.terminal_reason = "max_steps";
    }

    result.net = make_net(dataset, state.solution, v);
    result.loss = state.solution.loss;
    result.best_pattern = state.pattern;
    return result;
}

ChunkedFitResult chunked_fit(const Dataset& dataset, double fit_tol) {
    dataset.validate();
    if (!dataset.use_bias) throw InvalidInput("chunked fit requires homogeneous coordinates");
    const int n = static_cast<int>(dataset.n());
    const int d = static_cast<int>(dataset.d());
    const int p = d + 1;

    Eigen::MatrixXd cols = homogenize(dataset);

    ChunkedFitResult result;
    ChunkPlan& plan = result.plan;
    plan.order.resize(static_cast<std::size_t>(n));
    std::iota(plan.order.begin(), plan.order.end(), 0);
    std::stable_sort(plan.order.begin(), plan.order.end(), [&](int a, int b) {
        return dataset.x(a, d - 1) < dataset.x(b, d - 1);
    });

    const int chunks = (n + d) / (d + 1);
    for (int k = 0; k < chunks; ++k)
        plan.chunk_bounds.emplace_back(k * (d + 1), std::min(n, (k + 1) * (d + 1)));

    ShallowReluNet net;
    net.use_bias = true;
    net.W.resize(0, p);
    net.v.resize(0);
    net.c = 0.0;

    auto coord = [&](int sorted_idx) {
        return dataset.x(plan.order[static_cast<std::size_t>(sorted_idx)], d - 1);
    };

    for (int k = 0; k < chunks; ++k) {
        auto [start, end] = plan.chunk_bounds[static_cast<std::size_t>(k)];

        double alpha;
        if (k == 0) {
            alpha = coord(0) - 1.0;
        } else {
            double lo = coord(start - 1);
            double hi = coord(start);
            if (lo == hi)
                throw BoundaryTie("chunk boundary examples share coordinate d");
            alpha = 0.5 * (lo + hi);
        }
        plan.alphas.push_back(alpha);

        // Separating direction u: positive on chunks >= k, negative before.
        Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
        u(d - 1) = 1.0;
        u(d) = -alpha;
        double min_margin = std::numeric_limits<double>::infinity();
        for (int s = 0; s < n; ++s) {
            int idx = plan.order[static_cast<std::size_t>(s)];
            min_margin = std::min(min_margin, std::abs(u.dot(cols.col(idx))));
        }
        if (min_margin <= 0.0) throw BoundaryTie("an example lies on the separating hyperplane");
        Eigen::VectorXd u_scaled = u * ((1.0 + 1e-3) / min_margin);

        // Residual labels under the network built so far.
        Eigen::VectorXd residual(n);
        for (int i = 0; i < n; ++i) {
            residual(i) = dataset.y(i) -
                          (net.m() > 0 ? forward(net, dataset.x.row(i).transpose()) : 0.0);
        }

        // Interpolate the chunk's residuals (min-norm when underdetermined).
        const int size = end - start;
        Eigen::MatrixXd b_mat(size, p);
        Eigen::VectorXd b_rhs(size);
        for (int s = 0; s < size; ++s) {
            int idx = plan.order[static_cast<std::size_t>(start + s)];
            b_mat.row(s) = cols.col(idx).transpose();
            b_rhs(s) = residual(idx);
        }
        Eigen::VectorXd w = b_mat.completeOrthogonalDecomposition().solve(b_rhs);
        if ((b_mat * w - b_rhs).lpNorm<Eigen::Infinity>() >
            fit_tol * (1.0 + dataset.y.lpNorm<Eigen::Infinity>()))
            throw NotGeneralPosition("chunk examples are linearly dependent");

        double beta = 0.0;
        for (int s = 0; s < n; ++s) {
            int idx = plan.order[static_cast<std::size_t>(s)];
            double pre = w.dot(cols.col(idx));
            if (s < start)
                beta = std::max(beta, pre);    // phi(w . a) on earlier chunks
            else
                beta = std::max(beta, -pre);   // phi(-w . x) on this and later chunks
        }

        Eigen::VectorXd w1 = w + beta * u_scaled;
        Eigen::VectorXd w2 = beta * u_scaled;
        net.W.conservativeResize(net.m() + 2, p);
        net.W.row(net.m() - 2) = w1.transpose();
        net.W.row(net.m() - 1) = w2.transpose();
        net.v.conservativeResize(net.v.size() + 2);
        net.v(net.v.size() - 2) = 1.0;
        net.v(net.v.size() - 1) = -1.0;
    }

    result.net = net;
    for (int i = 0; i < n; ++i) {
        result.max_residual = std::max(
            result.max_residual, std::abs(forward(net, dataset.x.row(i).transpose()) - dataset.y(i)));
    }
    return result;
}

std::string search_result_to_json(const SearchResult& result) {
    json doc;
    doc["best_loss"] = result.loss;
    doc["best_pattern"] = json::parse(pattern_to_json(result.best_pattern));
    doc["net_checkpoint"] = json::parse(net_to_json(result.net));
    json steps = json::array();
    for (const auto& s : result.trace.steps) {
        json e;
        e["pattern_key"] = s.pattern_key;
        e["loss"] = s.loss;
        e["qp_solves"] = s.qp_solves;
        steps.push_back(std::move(e));
    }
    doc["trace"] = {{"steps", std::move(steps)},
                    {"terminal_reason", result.trace.terminal_reason}};
    return doc.dump();
}

}  // namespace zono
