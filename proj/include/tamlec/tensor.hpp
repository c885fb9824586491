#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "tamlec/error.hpp"

namespace tamlec {

/// Dense row-major float64 tensor. `grad` is allocated lazily for trainable
/// parameters and always matches `shape` when present.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    std::vector<double> grad;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, double fill = 0.0)
        : shape(std::move(s)), data(count(shape), fill) {}

    static std::size_t count(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return n;
    }

    std::size_t size() const { return data.size(); }
    std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const {
        return data[r * cols() + c];
    }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }
    void zero_grad() {
        if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    }
};

inline void require_shape(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorCode::ShapeMismatch, "numerics: " + what);
}

}  // namespace tamlec
