#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace depstat {

/// Dense row-major matrix of doubles. Used both for data (rows = observations)
/// and for n×n kernels.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows && j >= 0 && j < cols);
        return v[static_cast<std::size_t>(i) * cols + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows && j >= 0 && j < cols);
        return v[static_cast<std::size_t>(i) * cols + j];
    }

    std::span<const double> row(int i) const {
        return {v.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
    }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows == b.rows && a.cols == b.cols && a.v == b.v;
    }
};

}  // namespace depstat
