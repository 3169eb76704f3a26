#include "zono/network.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "zono/rng.hpp"

namespace zono {

using json = nlohmann::ordered_json;

double forward(const ShallowReluNet& net, const Eigen::VectorXd& x) {
    Eigen::VectorXd xb;
    if (net.use_bias) {
        xb.resize(x.size() + 1);
        xb.head(x.size()) = x;
        xb(x.size()) = 1.0;
    } else {
        xb = x;
    }
    if (xb.size() != net.p()) throw InvalidInput("example dimension does not match network");
    return net.v.dot((net.W * xb).cwiseMax(0.0)) + net.c;
}

Eigen::VectorXd forward_all(const ShallowReluNet& net, const Eigen::MatrixXd& cols) {
    if (cols.rows() != net.p()) throw InvalidInput("data dimension does not match network");
    Eigen::MatrixXd act = (net.W * cols).cwiseMax(0.0);
    return (act.transpose() * net.v).array() + net.c;
}

double empirical_loss(const ShallowReluNet& net, const Dataset& dataset, Loss kind) {
    Eigen::VectorXd pred = forward_all(net, homogenize(dataset));
    double total = 0.0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) total += point_loss(kind, pred(i), dataset.y(i));
    return total / static_cast<double>(pred.size());
}

double accuracy(const ShallowReluNet& net, const Dataset& dataset) {
    for (Eigen::Index i = 0; i < dataset.n(); ++i) {
        if (dataset.y(i) != 0.0 && dataset.y(i) != 1.0)
            throw LabelsNotBinary("accuracy requires labels in {0,1}");
    }
    Eigen::VectorXd pred = forward_all(net, homogenize(dataset));
    long correct = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        int predicted = pred(i) > 0.0 ? 1 : 0;
        if (predicted == static_cast<int>(dataset.y(i))) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

Eigen::VectorXd pm_half_vector(int m) {
    Eigen::VectorXd v(m);
    for (int j = 0; j < m; ++j) v(j) = (j < (m + 1) / 2) ? 1.0 : -1.0;
    return v;
}

ShallowReluNet gradient_descent(const Dataset& dataset, const GdOptions& opts) {
    dataset.validate();
    const int d = static_cast<int>(dataset.d());
    const int p = static_cast<int>(dataset.p());
    const int m = opts.m;
    const auto n = dataset.n();

    auto rng = make_rng(opts.seed, "gd-init");
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    ShallowReluNet net;
    net.use_bias = dataset.use_bias;
    net.W.setZero(m, p);
    // the first layer acts on homogenized inputs, so the bias column is part
    // of the weight matrix and shares the fan-in
    const double w_bound = std::sqrt(6.0 / static_cast<double>(p + m));
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < p; ++k) net.W(j, k) = w_bound * unif(rng);

    if (opts.train_v) {
        const double v_bound = std::sqrt(6.0 / static_cast<double>(m + 1));
        net.v.resize(m);
        for (int j = 0; j < m; ++j) net.v(j) = v_bound * unif(rng);
    } else {
        net.v = opts.v_fixed.value_or(pm_half_vector(m));
        if (net.v.size() != m) throw InvalidInput("fixed output weights have wrong length");
    }
    net.c = 0.0;

    Eigen::MatrixXd cols = homogenize(dataset);
    std::ofstream log;
    if (!opts.log_path.empty()) log.open(opts.log_path);

    for (long step = 0; step < opts.steps; ++step) {
        Eigen::MatrixXd pre = net.W * cols;                 // m x N
        Eigen::MatrixXd act = pre.cwiseMax(0.0);
        Eigen::VectorXd pred = (act.transpose() * net.v).array() + net.c;

        // batch gradient descent sums the per-example gradients; the reported
        // loss stays the per-example mean
        Eigen::VectorXd g(n);
        for (Eigen::Index i = 0; i < n; ++i) g(i) = point_loss_grad(opts.loss, pred(i), dataset.y(i));

        Eigen::MatrixXd mask = (pre.array() > 0.0).cast<double>();
        Eigen::MatrixXd back = mask.array() * (net.v * g.transpose()).array();  // m x N
        net.W -= opts.lr * (back * cols.transpose());
        if (opts.train_v) {
            net.v -= opts.lr * (act * g);
            net.c -= opts.lr * g.sum();
        } else {
            net.c -= opts.lr * g.sum();
        }

        if (!opts.log_path.empty() && (step % opts.log_every == 0 || step + 1 == opts.steps)) {
            double loss = empirical_loss(net, dataset, opts.loss);
            if (loss > 1e12) throw DivergenceDetected("training loss exceeded 1e12");
            json line;
            line["step"] = step;
            line["loss"] = loss;
            log << line.dump() << "\n";
        } else if (step % 1000 == 0) {
            double loss = empirical_loss(net, dataset, opts.loss);
            if (loss > 1e12) throw DivergenceDetected("training loss exceeded 1e12");
        }
    }
    return net;
}

std::string net_to_json(const ShallowReluNet& net) {
    json doc;
    doc["m"] = net.m();
    doc["p"] = net.p();
    doc["use_bias"] = net.use_bias;
    json w = json::array();
    for (Eigen::Index j = 0; j < net.m(); ++j) {
        json r = json::array();
        for (Eigen::Index k = 0; k < net.p(); ++k) r.push_back(net.W(j, k));
        w.push_back(std::move(r));
    }
    doc["W"] = std::move(w);
    json v = json::array();
    for (Eigen::Index j = 0; j < net.m(); ++j) v.push_back(net.v(j));
    doc["v"] = std::move(v);
    doc["c"] = net.c;
    return doc.dump();
}

ShallowReluNet net_from_json(const std::string& text) {
    json doc = json::parse(text);
    ShallowReluNet net;
    const auto m = doc.at("m").get<Eigen::Index>();
    const auto p = doc.at("p").get<Eigen::Index>();
    net.use_bias = doc.at("use_bias").get<bool>();
    net.W.resize(m, p);
    const auto& w = doc.at("W");
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index k = 0; k < p; ++k)
            net.W(j, k) = w[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].get<double>();
    net.v.resize(m);
    const auto& v = doc.at("v");
    for (Eigen::Index j = 0; j < m; ++j) net.v(j) = v[static_cast<std::size_t>(j)].get<double>();
    net.c = doc.at("c").get<double>();
    return net;
}

}  // namespace zono
