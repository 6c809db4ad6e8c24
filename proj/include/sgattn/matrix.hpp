#pragma once

#include <cstddef>
#include <vector>

namespace sgattn {

// Row-major double matrix. All heavy arithmetic routes through the kernels
// module so the scalar/AVX2 lanes stay interchangeable.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// C = A * B. Throws DimensionMismatch on shape errors (as do the rest).
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A * B^T.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// C = A^T * B.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
void scale_inplace(Matrix& m, double alpha);
void add_inplace(Matrix& m, const Matrix& other);

// Copies column block [begin, end) into a new matrix.
Matrix slice_cols(const Matrix& m, std::size_t begin, std::size_t end);
// Writes `block` into columns [begin, begin + block.cols()) of m.
void paste_cols(Matrix& m, const Matrix& block, std::size_t begin);

} // namespace sgattn
