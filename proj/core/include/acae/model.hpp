#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acae/matrix.hpp"
#include "acae/optim.hpp"
#include "acae/rng.hpp"

namespace acae {

enum class Activation : std::uint8_t { sigmoid = 0, identity = 1 };

Activation parse_activation(const std::string& name);
std::string to_string(Activation act);

inline double activate(Activation act, double x) {
    return act == Activation::identity ? x : sigmoid(x);
}

/// Full parameter set of the two-layer collaborative auto-encoder:
/// encoder/decoder weights and biases plus the per-user embedding table.
struct ModelParams {
    std::size_t user_count = 0;   // U
    std::size_t item_count = 0;   // I
    std::size_t hidden_dim = 0;   // K

    Activation encoder_act = Activation::sigmoid;
    Activation decoder_act = Activation::identity;

    Matrix w1;  // K x I encoder weights
    Matrix w2;  // I x K decoder weights
    Matrix b1;  // K x 1 encoder bias
    Matrix b2;  // I x 1 decoder bias
    Matrix p;   // K x U user embeddings, one column per user
};

/// Zero-initialized parameter set with consistent shapes.
ModelParams make_params(std::size_t users, std::size_t items, std::size_t hidden,
                        Activation encoder_act = Activation::sigmoid,
                        Activation decoder_act = Activation::identity);

/// Throws std::invalid_argument if tensor shapes disagree with (U, I, K).
void validate_shapes(const ModelParams& params);

/// The four perturbation sites: additive noise on the encoder weights, the
/// decoder weights, the user embedding (pre-activation), or the hidden
/// activation output.
enum class NoiseSite : std::uint8_t {
    encoder_weights = 0,
    decoder_weights = 1,
    user_embedding = 2,
    hidden_layer = 3,
};
inline constexpr NoiseSite kAllNoiseSites[] = {
    NoiseSite::encoder_weights, NoiseSite::decoder_weights,
    NoiseSite::user_embedding, NoiseSite::hidden_layer};

enum class NoiseKind : std::uint8_t { zero = 0, gaussian = 1, adversarial = 2 };

NoiseSite parse_noise_site(const std::string& name);
std::string to_string(NoiseSite site);
std::string to_string(NoiseKind kind);

struct NoiseSpec {
    NoiseSite site = NoiseSite::decoder_weights;
    NoiseKind kind = NoiseKind::zero;
    double epsilon = 0.0;
};

struct NoiseTensor {
    NoiseSpec spec;
    Matrix values;  // shaped for the site: K x I, I x K, K x 1, K x 1
};

/// (rows, cols) of the noise tensor at a site for these model dimensions.
std::pair<std::size_t, std::size_t> noise_shape(const ModelParams& params, NoiseSite site);

/// Intermediate quantities of one forward pass, kept for backpropagation.
struct ForwardTrace {
    Matrix z1;      // K x 1 pre-activation hidden
    Matrix h;       // K x 1 hidden activation (including hidden-site noise)
    Matrix logits;  // I x 1 output scores before the decoder activation
};

/// Multiplicative mask-out corruption of the input vector: every coordinate
/// is zeroed independently with probability drop_prob and survivors are
/// rescaled by 1/(1 - drop_prob). Off unless explicitly requested.
struct InputCorruption {
    double drop_prob = 0.0;
    RngStream* rng = nullptr;
};

/// One auto-encoder pass for user `u` over input vector y_u (length I), with
/// at most one noise site active:
///   z1     = (W1 [+N1]) y~_u + p_u [+n1] + b1
///   h      = enc(z1) [+n2]
///   logits = (W2 [+N2]) h + b2
ForwardTrace forward(const ModelParams& params, std::uint32_t user, const Matrix& y_u,
                     const NoiseTensor* noise = nullptr,
                     const InputCorruption* corruption = nullptr);

/// Per-user positive item lists indexed by dense user id; the input vectors
/// most operations consume.
using Profiles = std::vector<std::vector<std::uint32_t>>;

/// Sparse-input forward pass: items lists the coordinates of y_u equal to 1.
ForwardTrace forward_sparse(const ModelParams& params, std::uint32_t user,
                            std::span<const std::uint32_t> items,
                            const NoiseTensor* noise = nullptr);

/// Prediction scores for every item: decoder activation applied to the
/// logits (identity in the default configuration, so scores == logits).
Matrix score_user(const ModelParams& params, std::uint32_t user, const Matrix& y_u);

/// Top-n candidates by descending score, ties broken by ascending item
/// index. Returns min(n, |candidates|) indices.
std::vector<std::uint32_t> rank_top_n(const Matrix& scores,
                                      std::span<const std::uint32_t> candidates, std::size_t n);

/// One λ-weighted perturbed reconstruction term of the training objective.
struct NoiseTerm {
    const NoiseTensor* noise = nullptr;
    double lambda = 0.0;
};

/// Training loss over a batch of users:
///   sum_u CE(y_u, clean pass) + sum_s lambda_s * sum_u CE(y_u, pass under noise_s)
///   + gamma * (|W1|^2 + |W2|^2 + |b1|^2 + |b2|^2 + |P|^2)
/// where CE sums bce_with_logits over all I coordinates.
double batch_loss(const ModelParams& params, std::span<const std::uint32_t> users,
                  const Profiles& profiles, std::span<const NoiseTerm> noise_terms,
                  double gamma);

}  // namespace acae
