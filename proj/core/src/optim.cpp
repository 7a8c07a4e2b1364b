#include "acae/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace acae {

double bce_with_logits(double label, double logit) {
    if (label != 0.0 && label != 1.0) {
        throw std::invalid_argument("bce_with_logits: label must be 0 or 1");
    }
    return std::fmax(logit, 0.0) - logit * label + std::log1p(std::exp(-std::fabs(logit)));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void adagrad_step(Matrix& param, const Matrix& grad, Matrix& accumulator,
                  double base_rate, double damping) {
    if (!param.same_shape(grad) || !param.same_shape(accumulator)) {
        throw std::invalid_argument("adagrad_step: shape mismatch");
    }
    if (base_rate <= 0.0) throw std::invalid_argument("adagrad_step: base_rate must be > 0");
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad.values[i];
        if (g == 0.0) continue;
        accumulator.values[i] += g * g;
        param.values[i] -= base_rate * g / (std::sqrt(accumulator.values[i]) + damping);
    }
}

void sgd_step(Matrix& param, const Matrix& grad, double rate) {
    if (!param.same_shape(grad)) throw std::invalid_argument("sgd_step: shape mismatch");
    for (std::size_t i = 0; i < param.size(); ++i) param.values[i] -= rate * grad.values[i];
}

}  // namespace acae
