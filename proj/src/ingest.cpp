#include "zono/ingest.hpp"

#include <fstream>

#include <Eigen/Dense>

#include "zono/errors.hpp"

namespace zono {

namespace {

std::uint32_t read_be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

}  // namespace

IdxTensor read_idx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path);
    std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (raw.size() < 4) throw BadMagic("file shorter than magic number");
    if (raw[0] != 0 || raw[1] != 0) throw BadMagic("magic number does not start with 00 00");
    if (raw[2] != 0x08) throw UnsupportedElementType("only unsigned-byte payloads are supported");
    const std::size_t rank = raw[3];
    if (rank == 0) throw BadMagic("zero-rank tensor");
    if (raw.size() < 4 + 4 * rank) throw TruncatedPayload("header ends before dimension sizes");

    IdxTensor t;
    std::size_t count = 1;
    for (std::size_t r = 0; r < rank; ++r) {
        std::uint32_t dim = read_be32(raw.data() + 4 + 4 * r);
        if (dim == 0) throw BadMagic("zero dimension size");
        t.dims.push_back(dim);
        count *= dim;
    }
    const std::size_t offset = 4 + 4 * rank;
    if (raw.size() - offset < count) throw TruncatedPayload("payload shorter than product of dims");
    t.data.assign(raw.begin() + static_cast<long>(offset),
                  raw.begin() + static_cast<long>(offset + count));
    return t;
}

Dataset build_binary_task(const IdxTensor& images, const IdxTensor& labels, int class_a,
                          int class_b, int pca_dims, int n) {
    if (labels.dims.size() != 1) throw InvalidInput("labels must be rank 1");
    if (images.dims.size() != 3) throw InvalidInput("images must be rank 3");
    if (images.dims[0] != labels.dims[0])
        throw InvalidInput("image and label counts differ");
    if (pca_dims <= 0 || n <= 0) throw InvalidInput("pca_dims and n must be positive");

    const std::size_t pixels = images.dims[1] * images.dims[2];
    if (static_cast<std::size_t>(pca_dims) > pixels)
        throw InvalidInput("pca_dims exceeds pixel count");

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < labels.dims[0]; ++i) {
        int label = labels.data[i];
        if (label == class_a || label == class_b) keep.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(keep.size());
    if (k < n) throw NotEnoughExamples("fewer than n examples in the two classes");

    Eigen::MatrixXd flat(k, static_cast<Eigen::Index>(pixels));
    for (Eigen::Index r = 0; r < k; ++r) {
        const std::uint8_t* row = images.data.data() + keep[static_cast<std::size_t>(r)] * pixels;
        for (std::size_t c = 0; c < pixels; ++c)
            flat(r, static_cast<Eigen::Index>(c)) = static_cast<double>(row[c]) / 255.0;
    }
    Eigen::RowVectorXd mean = flat.colwise().mean();
    flat.rowwise() -= mean;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(flat, Eigen::ComputeThinV);
    Eigen::MatrixXd v = svd.matrixV().leftCols(pca_dims);
    // Deterministic sign: largest-magnitude loading positive.
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index arg = 0;
        v.col(c).cwiseAbs().maxCoeff(&arg);
        if (v(arg, c) < 0) v.col(c) = -v.col(c);
    }

    Eigen::VectorXd sigma = svd.singularValues().head(pca_dims);
    // Population std of component j over the fitting set is sigma_j / sqrt(K).
    Eigen::VectorXd stddev = sigma / std::sqrt(static_cast<double>(k));
    for (Eigen::Index c = 0; c < stddev.size(); ++c)
        if (stddev(c) <= 0) throw InvalidInput("degenerate principal component");

    Dataset out;
    out.use_bias = true;
    out.x.resize(n, pca_dims);
    out.y.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        out.x.row(r) = (flat.row(r) * v).cwiseQuotient(stddev.transpose());
        out.y(r) = labels.data[keep[static_cast<std::size_t>(r)]] == class_a ? 0.0 : 1.0;
    }
    return out;
}

}  // namespace zono
