// Command-line harness: dataset generation and ingestion, every optimizer,
// arrangement analysis, and table-style benchmarking.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zono/arrangement.hpp"
#include "zono/dataset.hpp"
#include "zono/errors.hpp"
#include "zono/ingest.hpp"
#include "zono/network.hpp"
#include "zono/region.hpp"
#include "zono/rng.hpp"
#include "zono/search.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace zono;

std::string slurp(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw InvalidInput("cannot write " + out_path);
        out << text << "\n";
    }
}

Eigen::VectorXd parse_v(const std::string& text, int m) {
    if (text == "pm-half") return pm_half_vector(m);
    Eigen::VectorXd v(m);
    std::stringstream ss(text);
    std::string item;
    int j = 0;
    while (std::getline(ss, item, ',')) {
        if (j >= m) throw InvalidInput("output weight list longer than m");
        v(j++) = std::stod(item);
    }
    if (j != m) throw InvalidInput("output weight list must have m entries");
    return v;
}

bool binary_labels(const Dataset& dataset) {
    for (Eigen::Index i = 0; i < dataset.n(); ++i)
        if (dataset.y(i) != 0.0 && dataset.y(i) != 1.0) return false;
    return dataset.n() > 0;
}

struct RunOutcome {
    double loss = 0.0;
    std::optional<double> acc;
    int qp_solves = 0;
    json detail;
};

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t k = xs.size();
    return k % 2 ? xs[k / 2] : 0.5 * (xs[k / 2 - 1] + xs[k / 2]);
}

double stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(xs.size() - 1));
}

struct SolveConfig {
    std::string method;
    int m = 1;
    Loss loss = Loss::Mse;
    std::string v_text = "pm-half";
    bool v_given = false;
    std::uint64_t seed = 0;
    int max_steps = 1024;
    int rounds = 50;
    double lr = 1e-3;
    long steps = 400000;
    bool fit_output_bias = true;
    std::size_t region_cap = 1000000;
};

RunOutcome run_solver(const Dataset& dataset, const SolveConfig& cfg) {
    RunOutcome out;
    if (cfg.method == "chunked") {
        ChunkedFitResult r = chunked_fit(dataset);
        out.loss = empirical_loss(r.net, dataset, cfg.loss);
        out.detail["net_checkpoint"] = json::parse(net_to_json(r.net));
        out.detail["max_residual"] = r.max_residual;
        if (binary_labels(dataset)) out.acc = accuracy(r.net, dataset);
        return out;
    }
    if (cfg.method == "gd") {
        GdOptions opts;
        opts.m = cfg.m;
        opts.loss = cfg.loss;
        opts.lr = cfg.lr;
        opts.steps = cfg.steps;
        opts.seed = cfg.seed;
        if (cfg.v_given) {
            opts.train_v = false;
            opts.v_fixed = parse_v(cfg.v_text, cfg.m);
        }
        ShallowReluNet net = gradient_descent(dataset, opts);
        out.loss = empirical_loss(net, dataset, cfg.loss);
        out.detail["net_checkpoint"] = json::parse(net_to_json(net));
        if (binary_labels(dataset)) out.acc = accuracy(net, dataset);
        return out;
    }
    Eigen::VectorXd v = parse_v(cfg.v_text, cfg.m);
    if (cfg.method == "random-vertex") {
        ActivationPattern pattern = random_vertex(dataset, cfg.m, cfg.seed);
        AlternateResult r = alternate_optimize(pattern, dataset, v, cfg.loss, cfg.rounds, 1e-12);
        ShallowReluNet net{r.W, r.v, r.c, dataset.use_bias};
        out.loss = r.loss;
        out.qp_solves = r.rounds;
        out.detail["net_checkpoint"] = json::parse(net_to_json(net));
        out.detail["pattern"] = json::parse(pattern_to_json(pattern));
        out.detail["rounds"] = r.rounds;
        if (binary_labels(dataset)) out.acc = accuracy(net, dataset);
        return out;
    }
    SearchResult r;
    if (cfg.method == "exact") {
        ExactErmOptions opts;
        opts.region_cap = cfg.region_cap;
        r = exact_erm(dataset, cfg.m, v, cfg.loss, cfg.fit_output_bias, opts);
    } else {
        LocalSearchOptions opts;
        opts.max_steps = cfg.max_steps;
        opts.seed = cfg.seed;
        opts.fit_output_bias = cfg.fit_output_bias;
        r = cfg.method == "gls" ? gls(dataset, cfg.m, v, cfg.loss, opts)
                                : mgls(dataset, cfg.m, v, cfg.loss, opts);
    }
    out.loss = r.loss;
    for (const auto& s : r.trace.steps) out.qp_solves += s.qp_solves;
    out.detail = json::parse(search_result_to_json(r));
    if (binary_labels(dataset)) out.acc = accuracy(r.net, dataset);
    return out;
}

int emit_run_result(const std::string& command, const Dataset& dataset, const SolveConfig& cfg,
                    const std::string& out_path) {
    auto t0 = std::chrono::steady_clock::now();
    RunOutcome outcome = run_solver(dataset, cfg);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    json doc;
    doc["schema"] = "relu-zono-result/1";
    doc["command"] = command;
    doc["seed"] = cfg.seed;
    doc["loss"] = outcome.loss;
    if (outcome.acc)
        doc["accuracy"] = *outcome.acc;
    else
        doc["accuracy"] = nullptr;
    doc["qp_solves"] = outcome.qp_solves;
    doc["wall_time_ms"] = ms;
    doc["artifact_paths"] =
        (out_path.empty() || out_path == "-") ? json::array() : json::array({out_path});
    doc["result"] = std::move(outcome.detail);
    std::string text = doc.dump();
    if (!(out_path.empty() || out_path == "-")) emit(text, out_path);
    std::cout << text << "\n";
    return 0;
}

double stability_epsilon(const Dataset& dataset) {
    // Small relative to the data scale; well inside general-position margins.
    double scale = std::sqrt(dataset.x.squaredNorm() /
                             static_cast<double>(std::max<Eigen::Index>(1, dataset.x.size())));
    return 1e-6 * std::max(scale, 1e-12);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shallow ReLU training by search over zonotope vertices"};
    app.require_subcommand(1);

    std::string data_path = "-";
    std::string out_path;

    // gen
    auto* gen = app.add_subcommand("gen", "dataset generators");
    gen->require_subcommand(1);
    int g_d = 2, g_mgen = 1;
    std::uint64_t g_seed = 0;
    double g_eps = 0.0;
    auto* gen_synth = gen->add_subcommand("synth", "teacher-labeled Gaussian data");
    gen_synth->add_option("--d", g_d);
    gen_synth->add_option("--m-gen", g_mgen);
    gen_synth->add_option("--seed", g_seed);
    gen_synth->add_option("--out", out_path);
    auto* gen_d1 = gen->add_subcommand("d1", "5-example discontinuity dataset");
    gen_d1->add_option("--epsilon", g_eps);
    gen_d1->add_option("--out", out_path);
    auto* gen_d2 = gen->add_subcommand("d2", "4-example planar discontinuity dataset");
    gen_d2->add_option("--epsilon", g_eps);
    gen_d2->add_option("--out", out_path);
    std::string sc_instance, sc_variant = "degenerate";
    double sc_delta1 = 1e-3, sc_delta2 = 2e-3, sc_eps = 1e-4;
    auto* gen_sc = gen->add_subcommand("setcover", "hardness-reduction dataset");
    gen_sc->add_option("--instance", sc_instance)->required();
    gen_sc->add_option("--variant", sc_variant)
        ->check(CLI::IsMember({"degenerate", "adversarial", "general"}));
    gen_sc->add_option("--epsilon", sc_eps);
    gen_sc->add_option("--delta1", sc_delta1);
    gen_sc->add_option("--delta2", sc_delta2);
    gen_sc->add_option("--seed", g_seed);
    gen_sc->add_option("--out", out_path);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "image archive ingestion");
    ingest->require_subcommand(1);
    std::string images_path, labels_path;
    int class_a = 0, class_b = 1, pca_dims = 8, take_n = 350;
    auto* ingest_idx = ingest->add_subcommand("idx", "two-class PCA-whitened task");
    ingest_idx->add_option("--images", images_path)->required();
    ingest_idx->add_option("--labels", labels_path)->required();
    ingest_idx->add_option("--class-a", class_a);
    ingest_idx->add_option("--class-b", class_b);
    ingest_idx->add_option("--pca-dims", pca_dims);
    ingest_idx->add_option("--n", take_n);
    ingest_idx->add_option("--out", out_path);

    // solve
    auto* solve = app.add_subcommand("solve", "optimizers");
    solve->require_subcommand(1);
    SolveConfig cfg;
    std::string loss_text = "mse";
    std::vector<CLI::App*> solve_subs;
    for (const char* name : {"exact", "gls", "mgls", "random-vertex", "chunked", "gd"}) {
        auto* sub = solve->add_subcommand(name);
        sub->add_option("--data", data_path);
        sub->add_option("--m", cfg.m);
        sub->add_option("--loss", loss_text)->check(CLI::IsMember({"mse", "l1", "logistic"}));
        sub->add_option("--v", cfg.v_text);
        sub->add_option("--seed", cfg.seed);
        sub->add_option("--max-steps", cfg.max_steps);
        sub->add_option("--rounds", cfg.rounds);
        sub->add_option("--lr", cfg.lr);
        sub->add_option("--steps", cfg.steps);
        sub->add_option("--fit-output-bias", cfg.fit_output_bias);
        sub->add_option("--region-cap", cfg.region_cap);
        sub->add_option("--out", out_path);
        solve_subs.push_back(sub);
    }

    // analyze
    auto* analyze = app.add_subcommand("analyze", "arrangement diagnostics");
    analyze->require_subcommand(1);
    std::size_t chamber_cap = 1000000;
    int trials = 20;
    double an_eps = 0.0, gp_tol = 1e-9;
    std::uint64_t an_seed = 0;
    auto* an_ch = analyze->add_subcommand("chambers", "enumerate and count");
    an_ch->add_option("--data", data_path);
    an_ch->add_option("--cap", chamber_cap);
    an_ch->add_option("--out", out_path);
    auto* an_st = analyze->add_subcommand("stability", "chamber sets under perturbation");
    an_st->add_option("--data", data_path);
    an_st->add_option("--trials", trials);
    an_st->add_option("--epsilon", an_eps);
    an_st->add_option("--seed", an_seed);
    an_st->add_option("--out", out_path);
    auto* an_gp = analyze->add_subcommand("gp", "general-position check");
    an_gp->add_option("--data", data_path);
    an_gp->add_option("--tol", gp_tol);
    an_gp->add_option("--out", out_path);

    // bench
    auto* bench = app.add_subcommand("bench", "experiment grids");
    std::string methods_text = "gls,mgls,random-vertex", ms_text = "2,4,8", bench_data;
    int bench_d = 4, bench_mgen = 2, bench_seeds = 8;
    std::uint64_t bench_seed0 = 0;
    std::string bench_loss = "mse";
    auto* bench_table = bench->add_subcommand("table", "method-by-width grid, CSV rows");
    bench_table->add_option("--data", bench_data);
    bench_table->add_option("--d", bench_d);
    bench_table->add_option("--m-gen", bench_mgen);
    bench_table->add_option("--methods", methods_text);
    bench_table->add_option("--m-list", ms_text);
    bench_table->add_option("--seeds", bench_seeds);
    bench_table->add_option("--seed0", bench_seed0);
    bench_table->add_option("--loss", bench_loss);
    bench_table->add_option("--max-steps", cfg.max_steps);
    bench_table->add_option("--steps", cfg.steps);
    bench_table->add_option("--lr", cfg.lr);
    bench_table->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (gen_synth->parsed()) {
            emit(dataset_to_json(gen_synthetic(g_d, g_mgen, g_seed)), out_path);
        } else if (gen_d1->parsed()) {
            emit(dataset_to_json(gen_appendix_d1(g_eps)), out_path);
        } else if (gen_d2->parsed()) {
            emit(dataset_to_json(gen_appendix_d2(g_eps)), out_path);
        } else if (gen_sc->parsed()) {
            SetCoverInstance inst = set_cover_instance_from_json(slurp(sc_instance));
            SetCoverVariant variant = sc_variant == "degenerate" ? SetCoverVariant::Degenerate
                                      : sc_variant == "adversarial"
                                          ? SetCoverVariant::AdversarialPerturbed
                                          : SetCoverVariant::GeneralPosition;
            SetCoverDatasetOptions opts;
            opts.delta1 = sc_delta1;
            opts.delta2 = sc_delta2;
            opts.epsilon = sc_eps;
            opts.seed = g_seed;
            emit(dataset_to_json(gen_set_cover_dataset(inst, variant, opts)), out_path);
        } else if (ingest_idx->parsed()) {
            Dataset ds = build_binary_task(read_idx(images_path), read_idx(labels_path), class_a,
                                           class_b, pca_dims, take_n);
            emit(dataset_to_json(ds), out_path);
        } else if (solve->parsed()) {
            cfg.loss = loss_from_string(loss_text);
            for (auto* sub : solve_subs) {
                if (!sub->parsed()) continue;
                cfg.method = sub->get_name();
                cfg.v_given = sub->count("--v") > 0;
                Dataset ds = dataset_from_json(slurp(data_path));
                ds.validate();
                return emit_run_result("solve " + cfg.method, ds, cfg, out_path);
            }
        } else if (an_ch->parsed()) {
            Dataset ds = dataset_from_json(slurp(data_path));
            ds.validate();
            ArrangementOptions opts;
            opts.chamber_cap = chamber_cap;
            ChamberSet chambers = enumerate_chambers(ds, opts);
            emit(chamber_set_to_json(chambers, static_cast<int>(ds.n())), out_path);
        } else if (an_st->parsed()) {
            Dataset ds = dataset_from_json(slurp(data_path));
            ds.validate();
            double eps = an_eps > 0.0 ? an_eps : stability_epsilon(ds);
            ChamberSet base = enumerate_chambers(ds);
            int identical = 0;
            for (int trial = 0; trial < trials; ++trial) {
                Dataset moved = perturb(ds, {eps, an_seed + static_cast<std::uint64_t>(trial)});
                if (enumerate_chambers(moved).patterns == base.patterns) ++identical;
            }
            json doc;
            doc["epsilon"] = eps;
            doc["trials"] = trials;
            doc["identical"] = identical;
            doc["chambers"] = base.patterns.size();
            emit(doc.dump(), out_path);
        } else if (an_gp->parsed()) {
            Dataset ds = dataset_from_json(slurp(data_path));
            ds.validate();
            GeneralPositionOptions opts;
            opts.tol = gp_tol;
            GeneralPositionResult r = is_general_position(ds, opts);
            json doc;
            doc["general_position"] = r.general_position;
            doc["probabilistic"] = r.probabilistic;
            doc["subsets_checked"] = r.subsets_checked;
            emit(doc.dump(), out_path);
        } else if (bench_table->parsed()) {
            Dataset base;
            bool fixed_data = !bench_data.empty();
            if (fixed_data) {
                base = dataset_from_json(slurp(bench_data));
                base.validate();
            }
            std::vector<std::string> methods, ms;
            for (std::stringstream ss(methods_text); std::getline(ss, methods.emplace_back(), ',');)
                ;
            if (!methods.empty() && methods.back().empty()) methods.pop_back();
            for (std::stringstream ss(ms_text); std::getline(ss, ms.emplace_back(), ',');)
                ;
            if (!ms.empty() && ms.back().empty()) ms.pop_back();

            std::ostringstream csv;
            csv << "method,d,m_gen_or_N,m,median_loss,std_loss,median_acc,std_acc\n";
            for (const std::string& method : methods) {
                for (const std::string& m_text : ms) {
                    SolveConfig cell = cfg;
                    cell.method = method;
                    cell.m = std::stoi(m_text);
                    cell.loss = loss_from_string(bench_loss);
                    std::vector<double> losses, accs;
                    for (int s = 0; s < bench_seeds; ++s) {
                        cell.seed = bench_seed0 + static_cast<std::uint64_t>(s);
                        Dataset ds = fixed_data ? base
                                                : gen_synthetic(bench_d, bench_mgen, cell.seed);
                        RunOutcome r = run_solver(ds, cell);
                        losses.push_back(r.loss);
                        if (r.acc) accs.push_back(*r.acc);
                    }
                    csv << method << "," << (fixed_data ? base.d() : bench_d) << ","
                        << (fixed_data ? base.n() : bench_mgen) << "," << cell.m << ","
                        << median(losses) << "," << stddev(losses) << ",";
                    if (!accs.empty())
                        csv << median(accs) << "," << stddev(accs) << "\n";
                    else
                        csv << ",\n";
                }
            }
            emit(csv.str(), out_path);
        }
        return 0;
    } catch (const Error& e) {
        json err;
        err["error"] = e.kind();
        err["detail"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json err;
        err["error"] = "internal";
        err["detail"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
