#pragma once

#include <cstddef>
#include <vector>

namespace curator {

// Dense row-major matrix of doubles. Plain container; the numeric
// kernels that use it live with their callers.
class Matrix {
public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    double& at(size_t r, size_t c) { return data_[r * cols_ + c]; }
    double at(size_t r, size_t c) const { return data_[r * cols_ + c]; }

    double* rowPtr(size_t r) { return data_.data() + r * cols_; }
    const double* rowPtr(size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool sameShape(const Matrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace curator
