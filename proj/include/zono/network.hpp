#ifndef ZONO_NETWORK_HPP
#define ZONO_NETWORK_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "zono/dataset.hpp"
#include "zono/losses.hpp"

namespace zono {

// f(x) = v^T phi(W xbar) + c. W is m x p where p = d + 1 when use_bias.
struct ShallowReluNet {
    Eigen::MatrixXd W;
    Eigen::VectorXd v;
    double c = 0.0;
    bool use_bias = true;

    Eigen::Index m() const { return W.rows(); }
    Eigen::Index p() const { return W.cols(); }
};

double forward(const ShallowReluNet& net, const Eigen::VectorXd& x);

// All predictions at once; columns of `cols` are homogenized examples.
Eigen::VectorXd forward_all(const ShallowReluNet& net, const Eigen::MatrixXd& cols);

double empirical_loss(const ShallowReluNet& net, const Dataset& dataset, Loss kind);

// Fraction of examples classified correctly by thresholding the logit at 0
// (an exact zero counts as class 0).
double accuracy(const ShallowReluNet& net, const Dataset& dataset);

struct GdOptions {
    int m = 1;
    Loss loss = Loss::Mse;
    double lr = 1e-3;
    long steps = 400000;
    std::uint64_t seed = 0;
    bool train_v = true;
    std::optional<Eigen::VectorXd> v_fixed;  // defaults to +/-1 halves when train_v is false
    long log_every = 1000;
    std::string log_path;  // JSON-lines {step, loss}; empty disables logging
};

ShallowReluNet gradient_descent(const Dataset& dataset, const GdOptions& opts);

// Half +1, half -1 output weights (the extra unit gets +1 when m is odd).
Eigen::VectorXd pm_half_vector(int m);

std::string net_to_json(const ShallowReluNet& net);
ShallowReluNet net_from_json(const std::string& text);

}  // namespace zono

#endif
