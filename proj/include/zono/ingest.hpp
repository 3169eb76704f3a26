#ifndef ZONO_INGEST_HPP
#define ZONO_INGEST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "zono/dataset.hpp"

namespace zono {

// Decoded IDX container (unsigned-byte payload only).
struct IdxTensor {
    std::vector<std::size_t> dims;
    std::vector<std::uint8_t> data;

    std::size_t count() const {
        std::size_t c = 1;
        for (std::size_t d : dims) c *= d;
        return c;
    }
};

IdxTensor read_idx(const std::string& path);

// Two-class PCA-whitened task from raw image/label tensors. PCA is fit on all
// filtered examples of the two classes; only the first n are emitted.
Dataset build_binary_task(const IdxTensor& images, const IdxTensor& labels, int class_a,
                          int class_b, int pca_dims, int n);

}  // namespace zono

#endif
