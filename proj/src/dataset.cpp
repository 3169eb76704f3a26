#include "zono/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>
#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "zono/rng.hpp"

namespace zono {

using json = nlohmann::ordered_json;
using rational = boost::multiprecision::cpp_rational;

void Dataset::validate() const {
    if (x.rows() < 1 || x.cols() < 1) throw InvalidInput("dataset needs N >= 1 and d >= 1");
    if (y.size() != x.rows()) throw InvalidInput("label count does not match example count");
    if (!x.allFinite() || !y.allFinite()) throw InvalidInput("dataset contains non-finite entries");
}

void SetCoverInstance::validate() const {
    if (universe_size < 1) throw InvalidInput("universe must be nonempty");
    if (subsets.empty()) throw InvalidInput("need at least one subset");
    if (t < 1) throw InvalidInput("target cover size must be positive");
    for (const auto& s : subsets) {
        if (s.empty()) throw InvalidInput("subsets must be nonempty");
        for (int u : s) {
            if (u < 1 || u > universe_size) throw InvalidInput("subset element outside universe");
        }
    }
}

Eigen::MatrixXd homogenize(const Dataset& dataset) {
    dataset.validate();
    Eigen::MatrixXd cols(dataset.p(), dataset.n());
    cols.topRows(dataset.d()) = dataset.x.transpose();
    if (dataset.use_bias) cols.row(dataset.d()).setOnes();
    return cols;
}

namespace {

// Exact rank of a p x k column subset via fraction-free elimination over the
// rationals. Doubles convert to rationals exactly, so this settles subsets the
// floating singular-value test finds borderline.
bool exact_full_column_rank(const Eigen::MatrixXd& cols, const std::vector<int>& subset) {
    const int rows = static_cast<int>(cols.rows());
    const int k = static_cast<int>(subset.size());
    std::vector<std::vector<rational>> a(rows, std::vector<rational>(k));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < k; ++j) a[i][j] = rational(cols(i, subset[j]));

    int rank = 0;
    for (int col = 0; col < k && rank < rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r) {
            if (a[r][col] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) return false;
        std::swap(a[rank], a[pivot]);
        for (int r = rank + 1; r < rows; ++r) {
            if (a[r][col] == 0) continue;
            rational f = a[r][col] / a[rank][col];
            for (int c = col; c < k; ++c) a[r][c] -= f * a[rank][c];
        }
        ++rank;
    }
    return rank == k;
}

std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        if (result > cap) return cap + 1;
        result = result * (n - k + i) / i;
    }
    return result;
}

bool subset_ok(const Eigen::MatrixXd& cols, const std::vector<int>& subset, double threshold) {
    const auto k = static_cast<Eigen::Index>(subset.size());
    Eigen::MatrixXd sub(cols.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) sub.col(j) = cols.col(subset[j]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin > 10.0 * threshold) return true;
    if (smin < 0.1 * threshold) return false;
    return exact_full_column_rank(cols, subset);
}

}  // namespace

GeneralPositionResult is_general_position(const Dataset& dataset, const GeneralPositionOptions& opts) {
    dataset.validate();
    Eigen::MatrixXd cols = homogenize(dataset);
    const auto n = static_cast<std::size_t>(dataset.n());
    const auto k = std::min<std::size_t>(n, static_cast<std::size_t>(dataset.p()));

    Eigen::JacobiSVD<Eigen::MatrixXd> full_svd(cols);
    const double smax = full_svd.singularValues()(0);
    const double threshold = opts.tol * smax;

    GeneralPositionResult result;
    const std::size_t count = binomial_capped(n, k, opts.subset_cap);
    if (count > opts.subset_cap) {
        if (!opts.allow_sampling)
            throw ComplexityRefused("subset count exceeds cap; enable sampling or raise the cap");
        result.probabilistic = true;
        auto rng = make_rng(opts.sample_seed, "gp-sample");
        std::vector<int> indices(n);
        for (std::size_t i = 0; i < n; ++i) indices[i] = static_cast<int>(i);
        for (std::size_t trial = 0; trial < opts.sample_count; ++trial) {
            std::shuffle(indices.begin(), indices.end(), rng);
            std::vector<int> subset(indices.begin(), indices.begin() + static_cast<long>(k));
            std::sort(subset.begin(), subset.end());
            ++result.subsets_checked;
            if (!subset_ok(cols, subset, threshold)) return result;
        }
        result.general_position = true;
        return result;
    }

    std::vector<int> subset(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = static_cast<int>(i);
    while (true) {
        ++result.subsets_checked;
        if (!subset_ok(cols, subset, threshold)) return result;
        // next combination
        long i = static_cast<long>(k) - 1;
        while (i >= 0 && subset[i] == static_cast<int>(n - k + i)) --i;
        if (i < 0) break;
        ++subset[i];
        for (long j = i + 1; j < static_cast<long>(k); ++j) subset[j] = subset[j - 1] + 1;
    }
    result.general_position = true;
    return result;
}

Dataset perturb(const Dataset& dataset, const PerturbationSpec& spec) {
    dataset.validate();
    if (spec.epsilon <= 0.0) throw InvalidInput("perturbation epsilon must be positive");
    auto rng = make_rng(spec.seed, "perturb");
    Dataset out = dataset;
    for (Eigen::Index i = 0; i < dataset.n(); ++i) {
        out.x.row(i) += ball_vector(rng, dataset.d(), spec.epsilon).transpose();
    }
    return out;
}

Dataset gen_synthetic(int d, int m_gen, std::uint64_t seed) {
    if (d < 1 || m_gen < 1) throw InvalidInput("d and m_gen must be positive");
    const int n = (d + 1) * m_gen;
    auto data_rng = make_rng(seed, "synth-data");
    auto teacher_rng = make_rng(seed, "synth-teacher");

    Dataset out;
    out.use_bias = true;
    out.x = gaussian_matrix(data_rng, n, d);

    Eigen::MatrixXd w_gen = gaussian_matrix(teacher_rng, m_gen, d + 1);
    Eigen::VectorXd v_gen = gaussian_vector(teacher_rng, m_gen);
    const double c_gen = gaussian_vector(teacher_rng, 1)(0);

    out.y.resize(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd xb(d + 1);
        xb.head(d) = out.x.row(i).transpose();
        xb(d) = 1.0;
        out.y(i) = v_gen.dot((w_gen * xb).cwiseMax(0.0)) + c_gen;
    }
    return out;
}

Dataset gen_appendix_d1(double epsilon) {
    if (epsilon < 0.0) throw InvalidInput("epsilon must be nonnegative");
    Dataset out;
    out.use_bias = true;
    out.x.resize(5, 2);
    out.x << 1, 0, 2, 0, 3, 0, 4, 0, 5, 0;
    out.x(2, 1) = epsilon;
    out.y.resize(5);
    out.y << 1, 2, 2.5, 4, 5;
    return out;
}

Dataset gen_appendix_d2(double epsilon) {
    if (epsilon < 0.0) throw InvalidInput("epsilon must be nonnegative");
    Dataset out;
    out.use_bias = false;
    out.x.resize(4, 3);
    out.x << -1, 0, 0, 2, 1, 0, -1, 1, 0, -1, -1, 0;
    out.x(1, 2) = epsilon;
    out.y.resize(4);
    out.y << 4, 3, 2, 1;
    return out;
}

double set_cover_gamma(const SetCoverInstance& instance) {
    const double m = static_cast<double>(instance.num_subsets());
    return 0.01 / (m * m);
}

Dataset gen_set_cover_dataset(const SetCoverInstance& instance, SetCoverVariant variant,
                              const SetCoverDatasetOptions& opts) {
    instance.validate();
    const int m = instance.num_subsets();
    const int d = m + 2;
    const int n = instance.universe_size + m + 2;
    if (d > opts.max_d)
        throw ComplexityRefused("reduction dimension exceeds cap; raise max_d to override");
    if (variant == SetCoverVariant::GeneralPosition) {
        if (!(0.0 < opts.delta1 && opts.delta1 < opts.delta2 && opts.delta2 < 1.0 / (2.0 * d)))
            throw InvalidDeltas("need 0 < delta1 < delta2 < 1/(2d)");
    }
    if (variant == SetCoverVariant::AdversarialPerturbed && opts.epsilon <= 0.0)
        throw InvalidInput("adversarial variant needs epsilon > 0");

    const double gamma = set_cover_gamma(instance);

    // Coordinate layout: 0 = gamma coordinate, 1 = unit coordinate, 2 + i = subset T_i.
    Dataset out;
    out.use_bias = false;
    out.x = Eigen::MatrixXd::Zero(n, d);
    out.y = Eigen::VectorXd::Zero(n);

    int row = 0;
    out.x(row, 0) = 1.0;
    out.y(row) = gamma;
    ++row;
    out.x(row, 1) = 1.0;
    out.y(row) = 1.0;
    ++row;
    for (int i = 0; i < m; ++i, ++row) {
        out.x(row, 0) = 1.0;
        out.x(row, 2 + i) = 1.0;
        out.y(row) = gamma;
    }

    auto rng = make_rng(opts.seed, "setcover-gp");
    std::uniform_real_distribution<double> unif(opts.delta1, opts.delta2);
    for (int u = 1; u <= instance.universe_size; ++u, ++row) {
        out.x(row, 1) = 1.0;
        for (int i = 0; i < m; ++i) {
            const auto& s = instance.subsets[static_cast<std::size_t>(i)];
            if (std::find(s.begin(), s.end(), u) != s.end()) out.x(row, 2 + i) = 1.0;
        }
        if (variant == SetCoverVariant::AdversarialPerturbed) {
            out.x(row, 2) += opts.epsilon;
        } else if (variant == SetCoverVariant::GeneralPosition) {
            for (int c = 0; c < d; ++c) out.x(row, c) -= unif(rng);
        }
        out.y(row) = 0.0;
    }
    return out;
}

Eigen::VectorXd set_cover_witness_weights(const SetCoverInstance& instance,
                                          const std::vector<int>& cover, double coverage_weight) {
    const int d = instance.num_subsets() + 2;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    w(0) = set_cover_gamma(instance);
    w(1) = 1.0;
    for (int i : cover) {
        if (i < 0 || i >= instance.num_subsets()) throw InvalidInput("cover index out of range");
        w(2 + i) = coverage_weight;
    }
    return w;
}

std::string dataset_to_json(const Dataset& dataset) {
    dataset.validate();
    json doc;
    doc["schema"] = "relu-zono-dataset/1";
    doc["d"] = dataset.d();
    doc["n"] = dataset.n();
    doc["use_bias"] = dataset.use_bias;
    json rows = json::array();
    for (Eigen::Index i = 0; i < dataset.n(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < dataset.d(); ++j) r.push_back(dataset.x(i, j));
        rows.push_back(std::move(r));
    }
    doc["x"] = std::move(rows);
    json labels = json::array();
    for (Eigen::Index i = 0; i < dataset.n(); ++i) labels.push_back(dataset.y(i));
    doc["y"] = std::move(labels);
    return doc.dump();
}

Dataset dataset_from_json(const std::string& text) {
    json doc = json::parse(text);
    if (doc.value("schema", "") != "relu-zono-dataset/1")
        throw InvalidInput("unknown dataset schema");
    const auto n = doc.at("n").get<Eigen::Index>();
    const auto d = doc.at("d").get<Eigen::Index>();
    Dataset out;
    out.use_bias = doc.at("use_bias").get<bool>();
    out.x.resize(n, d);
    out.y.resize(n);
    const auto& rows = doc.at("x");
    const auto& labels = doc.at("y");
    if (static_cast<Eigen::Index>(rows.size()) != n || static_cast<Eigen::Index>(labels.size()) != n)
        throw InvalidInput("dataset row count mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(r.size()) != d) throw InvalidInput("dataset column count mismatch");
        for (Eigen::Index j = 0; j < d; ++j) out.x(i, j) = r[static_cast<std::size_t>(j)].get<double>();
        out.y(i) = labels[static_cast<std::size_t>(i)].get<double>();
    }
    out.validate();
    return out;
}

std::string set_cover_instance_to_json(const SetCoverInstance& instance) {
    instance.validate();
    json doc;
    doc["universe"] = instance.universe_size;
    doc["subsets"] = instance.subsets;
    doc["t"] = instance.t;
    return doc.dump();
}

SetCoverInstance set_cover_instance_from_json(const std::string& text) {
    json doc = json::parse(text);
    SetCoverInstance out;
    out.universe_size = doc.at("universe").get<int>();
    out.subsets = doc.at("subsets").get<std::vector<std::vector<int>>>();
    out.t = doc.at("t").get<int>();
    out.validate();
    return out;
}

}  // namespace zono
