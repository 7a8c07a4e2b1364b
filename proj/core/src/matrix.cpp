#include "acae/matrix.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace acae {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::column(std::vector<double> v) {
    Matrix m;
    m.rows = v.size();
    m.cols = 1;
    m.values = std::move(v);
    return m;
}

Matrix matvec(const Matrix& m, const Matrix& v) {
    if (v.cols != 1 || m.cols != v.rows) {
        std::ostringstream msg;
        msg << "matvec: shape mismatch, " << m.rows << "x" << m.cols
            << " times " << v.rows << "x" << v.cols;
        throw std::invalid_argument(msg.str());
    }
    Matrix out(m.rows, 1);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = &m.values[r * m.cols];
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * v.values[c];
        out.values[r] = acc;
    }
    return out;
}

Matrix outer(const Matrix& u, const Matrix& v) {
    if (u.cols != 1 || v.cols != 1) {
        throw std::invalid_argument("outer: arguments must be column vectors");
    }
    Matrix out(u.rows, v.rows);
    for (std::size_t i = 0; i < u.rows; ++i) {
        const double ui = u.values[i];
        double* row = &out.values[i * v.rows];
        for (std::size_t j = 0; j < v.rows; ++j) row[j] = ui * v.values[j];
    }
    return out;
}

double frobenius_norm(const Matrix& m) {
    double sum = 0.0;
    for (double x : m.values) sum += x * x;
    return std::sqrt(sum);
}

Matrix scale_to_norm(const Matrix& m, double target) {
    if (target < 0.0) throw std::invalid_argument("scale_to_norm: negative target");
    const double norm = frobenius_norm(m);
    Matrix out(m.rows, m.cols);
    if (norm < kDegenerateNorm) return out;
    const double factor = target / norm;
    for (std::size_t i = 0; i < m.size(); ++i) out.values[i] = m.values[i] * factor;
    return out;
}

bool all_finite(const Matrix& m) {
    for (double x : m.values) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace acae
