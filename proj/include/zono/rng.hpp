#ifndef ZONO_RNG_HPP
#define ZONO_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace zono {

// All randomness in the library flows from a single 64-bit seed through named
// streams, so that e.g. data generation and search initialization draw from
// independent deterministic sequences.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream) {
    // FNV-1a over the stream name, mixed with the user seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream) {
    return std::mt19937_64(stream_seed(seed, stream));
}

inline Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
    return out;
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = normal(rng);
    return out;
}

// Uniform sample from the closed Euclidean ball of given radius.
inline Eigen::VectorXd ball_vector(std::mt19937_64& rng, Eigen::Index dim, double radius) {
    Eigen::VectorXd dir = gaussian_vector(rng, dim);
    double norm = dir.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(dim);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim));
    return dir * (r / norm);
}

}  // namespace zono

#endif
