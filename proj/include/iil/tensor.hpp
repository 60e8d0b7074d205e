#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "iil/errors.hpp"

namespace iil {

// Dense row-major real64 batch buffer for activations and observations.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    static Matrix from_row(const std::vector<double>& v) {
        Matrix m(1, v.size());
        m.data = v;
        return m;
    }
};

// Learnable dense array plus its accumulated gradient. grad always has the
// same extent as values and is zeroed on construction and by zero_grad().
struct ParamTensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;
    std::vector<double> grad;

    ParamTensor() = default;

    explicit ParamTensor(std::vector<std::size_t> shape_in)
        : shape(std::move(shape_in)) {
        for (std::size_t e : shape) {
            if (e == 0) throw DimensionError("ParamTensor: zero extent");
        }
        values.assign(size(), 0.0);
        grad.assign(size(), 0.0);
    }

    std::size_t size() const {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               std::multiplies<>());
    }

    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

// Named view over a set of tensors; the unit the optimizer and the
// checkpoint writer operate on.
struct NamedParam {
    std::string name;
    ParamTensor* tensor;
};

}  // namespace iil
