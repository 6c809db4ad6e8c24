#include "sgattn/matrix.hpp"

#include "sgattn/errors.hpp"
#include "sgattn/kernels.hpp"

#include <cstring>

namespace sgattn {

namespace {

void require(bool ok, const char* what) {
    if (!ok)
        throw DimensionMismatch(what);
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t t = 0; t < a.cols(); ++t)
            kernels::axpy(a(i, t), b.row(t), c.row(i), b.cols());
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "matmul_nt: inner dimensions differ");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            c(i, j) = kernels::dot(a.row(i), b.row(j), a.cols());
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows(), "matmul_tn: inner dimensions differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t t = 0; t < a.cols(); ++t)
            kernels::axpy(a(i, t), b.row(i), c.row(t), b.cols());
    return c;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "add: shapes differ");
    Matrix c(a.rows(), a.cols());
    kernels::vadd(a.data(), b.data(), c.data(), a.size());
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "sub: shapes differ");
    Matrix c(a.rows(), a.cols());
    kernels::vsub(a.data(), b.data(), c.data(), a.size());
    return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "hadamard: shapes differ");
    Matrix c(a.rows(), a.cols());
    kernels::vmul(a.data(), b.data(), c.data(), a.size());
    return c;
}

void scale_inplace(Matrix& m, double alpha) { kernels::scale(alpha, m.data(), m.size()); }

void add_inplace(Matrix& m, const Matrix& other) {
    require(m.same_shape(other), "add_inplace: shapes differ");
    kernels::vadd(m.data(), other.data(), m.data(), m.size());
}

Matrix slice_cols(const Matrix& m, std::size_t begin, std::size_t end) {
    require(begin <= end && end <= m.cols(), "slice_cols: bad column range");
    Matrix out(m.rows(), end - begin);
    for (std::size_t i = 0; i < m.rows(); ++i)
        std::memcpy(out.row(i), m.row(i) + begin, (end - begin) * sizeof(double));
    return out;
}

void paste_cols(Matrix& m, const Matrix& block, std::size_t begin) {
    require(block.rows() == m.rows() && begin + block.cols() <= m.cols(),
            "paste_cols: block does not fit");
    for (std::size_t i = 0; i < m.rows(); ++i)
        std::memcpy(m.row(i) + begin, block.row(i), block.cols() * sizeof(double));
}

} // namespace sgattn
