#pragma once

#include "acae/matrix.hpp"

namespace acae {

/// Binary cross-entropy of a {0,1} label against a logit, evaluated in the
/// numerically stable form max(z,0) - z*y + log(1 + exp(-|z|)). Finite and
/// nonnegative for every finite logit.
double bce_with_logits(double label, double logit);

/// Logistic function 1 / (1 + exp(-x)), overflow-safe on both tails.
double sigmoid(double x);

/// One Adagrad update, in place:
///   accumulator += grad * grad          (elementwise)
///   param       -= base_rate * grad / (sqrt(accumulator) + damping)
/// Zero-gradient coordinates are left untouched, so the update is well
/// defined even at damping == 0. Throws std::invalid_argument on shape
/// mismatch.
void adagrad_step(Matrix& param, const Matrix& grad, Matrix& accumulator,
                  double base_rate, double damping = 1e-8);

/// Plain gradient step param -= rate * grad, shape-checked.
void sgd_step(Matrix& param, const Matrix& grad, double rate);

}  // namespace acae
