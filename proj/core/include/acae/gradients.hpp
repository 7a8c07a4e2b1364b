#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "acae/model.hpp"

namespace acae {

/// Gradients of the batch loss with respect to every parameter tensor.
/// Embedding gradients are carried only for the user columns present in the
/// batch; columns of absent users are implicitly zero (their regularizer
/// contribution is deferred until they appear in a batch).
struct ParamGrads {
    Matrix w1;  // K x I
    Matrix w2;  // I x K
    Matrix b1;  // K x 1
    Matrix b2;  // I x 1
    std::vector<std::pair<std::uint32_t, Matrix>> p_cols;  // (user, K x 1)
};

/// Exact gradient of batch_loss with respect to each parameter, with the
/// noise tensors held constant. Contributions flow through every lambda-
/// weighted perturbed pass as well as the clean one. When loss_out is
/// non-null it receives the batch loss of the same objective, sparing the
/// training loop a second forward pass.
ParamGrads backprop(const ModelParams& params, std::span<const std::uint32_t> users,
                    const Profiles& profiles, std::span<const NoiseTerm> noise_terms,
                    double gamma, double* loss_out = nullptr);

/// Gradient of the unregularized batch cross-entropy loss with respect to
/// the noise variable at `site`, evaluated at zero noise (the linearization
/// point of the fast-gradient construction).
Matrix noise_grad(const ModelParams& params, std::span<const std::uint32_t> users,
                  const Profiles& profiles, NoiseSite site);

/// Fast-gradient adversarial noise: the noise gradient rescaled to Frobenius
/// norm epsilon. A degenerate gradient (norm < kDegenerateNorm) or epsilon
/// of zero yields the zero tensor.
NoiseTensor make_adversarial_noise(const ModelParams& params,
                                   std::span<const std::uint32_t> users,
                                   const Profiles& profiles, NoiseSite site, double epsilon);

/// I.i.d. standard normal entries rescaled to Frobenius norm epsilon, so
/// Gaussian and adversarial noise are comparable at equal noise level.
NoiseTensor make_gaussian_noise(const ModelParams& params, NoiseSite site, double epsilon,
                                RngStream& rng);

}  // namespace acae
