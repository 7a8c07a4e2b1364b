#pragma once

#include <cstddef>
#include <vector>

namespace acae {

/// Dense row-major matrix of 64-bit reals. Column vectors are matrices with
/// cols == 1; that is the only vector type the library uses.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    // Flat row-major access.
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    std::size_t size() const { return values.size(); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    static Matrix identity(std::size_t n);
    static Matrix column(std::vector<double> v);
};

/// Gradients below this Frobenius norm are treated as directionless; noise
/// construction and normalization return the zero matrix instead of an
/// arbitrary direction.
inline constexpr double kDegenerateNorm = 1e-12;

/// Standard matrix-vector product with 64-bit accumulation.
/// Throws std::invalid_argument on dimension mismatch.
Matrix matvec(const Matrix& m, const Matrix& v);

/// Outer product of two column vectors: result(i, j) = u[i] * v[j].
Matrix outer(const Matrix& u, const Matrix& v);

/// Frobenius norm, sqrt of the sum of squared entries.
double frobenius_norm(const Matrix& m);

/// Rescales m so its Frobenius norm equals target, preserving direction.
/// Inputs with norm below kDegenerateNorm map to the zero matrix.
Matrix scale_to_norm(const Matrix& m, double target);

bool all_finite(const Matrix& m);

}  // namespace acae
