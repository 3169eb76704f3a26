#ifndef ZONO_LOSSES_HPP
#define ZONO_LOSSES_HPP

#include <cmath>
#include <string>

#include "zono/errors.hpp"

namespace zono {

enum class Loss { Mse, L1, Logistic };

inline double softplus(double t) {
    // log(1 + e^t) without overflow
    return (t > 0.0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double sigmoid(double t) {
    return (t >= 0.0) ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

inline double point_loss(Loss kind, double yhat, double y) {
    switch (kind) {
        case Loss::Mse:
            return (yhat - y) * (yhat - y);
        case Loss::L1:
            return std::abs(yhat - y);
        case Loss::Logistic:
            return -y * yhat + softplus(yhat);
    }
    return 0.0;
}

// d loss / d yhat (a subgradient for L1).
inline double point_loss_grad(Loss kind, double yhat, double y) {
    switch (kind) {
        case Loss::Mse:
            return 2.0 * (yhat - y);
        case Loss::L1:
            return (yhat > y) ? 1.0 : (yhat < y) ? -1.0 : 0.0;
        case Loss::Logistic:
            return -y + sigmoid(yhat);
    }
    return 0.0;
}

inline Loss loss_from_string(const std::string& s) {
    if (s == "mse") return Loss::Mse;
    if (s == "l1") return Loss::L1;
    if (s == "logistic") return Loss::Logistic;
    throw InvalidInput("unknown loss kind: " + s);
}

inline std::string loss_to_string(Loss kind) {
    switch (kind) {
        case Loss::Mse: return "mse";
        case Loss::L1: return "l1";
        case Loss::Logistic: return "logistic";
    }
    return "mse";
}

}  // namespace zono

#endif
