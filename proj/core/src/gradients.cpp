#include "acae/gradients.hpp"

#include <algorithm>
#include <stdexcept>

namespace acae {
namespace {

struct UserDeltas {
    ForwardTrace trace;
    Matrix delta_out;  // I x 1, d loss / d logits
    Matrix delta_h;    // K x 1, d loss / d h
    Matrix delta_z1;   // K x 1, d loss / d z1
};

// Backward pass for one user. `label` is an I-sized scratch with the user's
// positives already marked.
UserDeltas user_deltas(const ModelParams& m, std::uint32_t u,
                       std::span<const std::uint32_t> items, const std::vector<char>& label,
                       const NoiseTensor* noise) {
    const std::size_t K = m.hidden_dim;
    const std::size_t I = m.item_count;
    const bool noisy_decoder = noise && noise->spec.site == NoiseSite::decoder_weights;

    UserDeltas d;
    d.trace = forward_sparse(m, u, items, noise);

    d.delta_out = Matrix(I, 1);
    for (std::size_t i = 0; i < I; ++i) {
        const double z = d.trace.logits.values[i];
        const double out = activate(m.decoder_act, z);
        double delta = sigmoid(out) - (label[i] ? 1.0 : 0.0);
        if (m.decoder_act == Activation::sigmoid) delta *= out * (1.0 - out);
        d.delta_out.values[i] = delta;
    }

    d.delta_h = Matrix(K, 1);
    for (std::size_t i = 0; i < I; ++i) {
        const double di = d.delta_out.values[i];
        if (di == 0.0) continue;
        const double* row = &m.w2.values[i * K];
        for (std::size_t k = 0; k < K; ++k) d.delta_h.values[k] += row[k] * di;
        if (noisy_decoder) {
            const double* nrow = &noise->values.values[i * K];
            for (std::size_t k = 0; k < K; ++k) d.delta_h.values[k] += nrow[k] * di;
        }
    }

    d.delta_z1 = Matrix(K, 1);
    for (std::size_t k = 0; k < K; ++k) {
        double g = d.delta_h.values[k];
        if (m.encoder_act == Activation::sigmoid) {
            // Derivative at the pre-noise activation sigma(z1).
            const double s = activate(Activation::sigmoid, d.trace.z1.values[k]);
            g *= s * (1.0 - s);
        }
        d.delta_z1.values[k] = g;
    }
    return d;
}

}  // namespace

ParamGrads backprop(const ModelParams& params, std::span<const std::uint32_t> users,
                    const Profiles& profiles, std::span<const NoiseTerm> noise_terms,
                    double gamma, double* loss_out) {
    if (gamma < 0.0) throw std::invalid_argument("backprop: gamma must be >= 0");
    double loss = 0.0;
    const std::size_t K = params.hidden_dim;
    const std::size_t I = params.item_count;

    ParamGrads g;
    g.w1 = Matrix(K, I);
    g.w2 = Matrix(I, K);
    g.b1 = Matrix(K, 1);
    g.b2 = Matrix(I, 1);

    std::vector<std::size_t> p_slot(params.user_count, static_cast<std::size_t>(-1));
    const auto p_col = [&](std::uint32_t u) -> Matrix& {
        if (p_slot[u] == static_cast<std::size_t>(-1)) {
            p_slot[u] = g.p_cols.size();
            g.p_cols.emplace_back(u, Matrix(K, 1));
        }
        return g.p_cols[p_slot[u]].second;
    };

    std::vector<char> label(I, 0);
    for (std::uint32_t u : users) {
        if (u >= profiles.size()) throw std::invalid_argument("backprop: user out of range");
        const auto& items = profiles[u];
        for (std::uint32_t it : items) label[it] = 1;

        const auto accumulate = [&](const NoiseTensor* noise, double weight) {
            const UserDeltas d = user_deltas(params, u, items, label, noise);
            if (loss_out) {
                double sum = 0.0;
                for (std::size_t i = 0; i < I; ++i) {
                    const double out = activate(params.decoder_act, d.trace.logits.values[i]);
                    sum += bce_with_logits(label[i] ? 1.0 : 0.0, out);
                }
                loss += weight * sum;
            }
            for (std::size_t i = 0; i < I; ++i) {
                const double di = weight * d.delta_out.values[i];
                if (di == 0.0) continue;
                g.b2.values[i] += di;
                double* row = &g.w2.values[i * K];
                for (std::size_t k = 0; k < K; ++k) row[k] += di * d.trace.h.values[k];
            }
            Matrix& pu = p_col(u);
            for (std::size_t k = 0; k < K; ++k) {
                const double dk = weight * d.delta_z1.values[k];
                g.b1.values[k] += dk;
                pu.values[k] += dk;
                for (std::uint32_t it : items) g.w1(k, it) += dk;
            }
        };

        accumulate(nullptr, 1.0);
        for (const NoiseTerm& term : noise_terms) {
            if (term.lambda == 0.0) continue;
            accumulate(term.noise, term.lambda);
        }

        for (std::uint32_t it : items) label[it] = 0;
    }

    if (gamma > 0.0) {
        const double two_gamma = 2.0 * gamma;
        for (std::size_t i = 0; i < g.w1.size(); ++i) g.w1.values[i] += two_gamma * params.w1.values[i];
        for (std::size_t i = 0; i < g.w2.size(); ++i) g.w2.values[i] += two_gamma * params.w2.values[i];
        for (std::size_t i = 0; i < g.b1.size(); ++i) g.b1.values[i] += two_gamma * params.b1.values[i];
        for (std::size_t i = 0; i < g.b2.size(); ++i) g.b2.values[i] += two_gamma * params.b2.values[i];
        for (auto& [u, col] : g.p_cols) {
            for (std::size_t k = 0; k < K; ++k) col.values[k] += two_gamma * params.p(k, u);
        }
        if (loss_out) {
            const auto sq = [](const Matrix& m) {
                double s = 0.0;
                for (double x : m.values) s += x * x;
                return s;
            };
            loss += gamma * (sq(params.w1) + sq(params.w2) + sq(params.b1) + sq(params.b2) +
                             sq(params.p));
        }
    }
    if (loss_out) *loss_out = loss;
    return g;
}

Matrix noise_grad(const ModelParams& params, std::span<const std::uint32_t> users,
                  const Profiles& profiles, NoiseSite site) {
    const std::size_t K = params.hidden_dim;
    const std::size_t I = params.item_count;
    const auto [rows, cols] = noise_shape(params, site);
    Matrix grad(rows, cols);

    // Canonical accumulation order, so the result does not depend on how the
    // batch happens to be permuted.
    std::vector<std::uint32_t> ordered(users.begin(), users.end());
    std::sort(ordered.begin(), ordered.end());

    std::vector<char> label(I, 0);
    for (std::uint32_t u : ordered) {
        if (u >= profiles.size()) throw std::invalid_argument("noise_grad: user out of range");
        const auto& items = profiles[u];
        for (std::uint32_t it : items) label[it] = 1;
        const UserDeltas d = user_deltas(params, u, items, label, nullptr);
        switch (site) {
            case NoiseSite::encoder_weights:
                // d loss / d N1 = delta_z1 (x) y_u, nonzero only at rated columns.
                for (std::size_t k = 0; k < K; ++k) {
                    const double dk = d.delta_z1.values[k];
                    for (std::uint32_t it : items) grad(k, it) += dk;
                }
                break;
            case NoiseSite::decoder_weights:
                // d loss / d N2 = delta_out (x) h.
                for (std::size_t i = 0; i < I; ++i) {
                    const double di = d.delta_out.values[i];
                    if (di == 0.0) continue;
                    double* row = &grad.values[i * K];
                    for (std::size_t k = 0; k < K; ++k) row[k] += di * d.trace.h.values[k];
                }
                break;
            case NoiseSite::user_embedding:
                for (std::size_t k = 0; k < K; ++k) grad.values[k] += d.delta_z1.values[k];
                break;
            case NoiseSite::hidden_layer:
                for (std::size_t k = 0; k < K; ++k) grad.values[k] += d.delta_h.values[k];
                break;
        }
        for (std::uint32_t it : items) label[it] = 0;
    }
    return grad;
}

NoiseTensor make_adversarial_noise(const ModelParams& params,
                                   std::span<const std::uint32_t> users,
                                   const Profiles& profiles, NoiseSite site, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("make_adversarial_noise: epsilon must be >= 0");
    NoiseTensor n;
    n.spec.site = site;
    n.spec.epsilon = epsilon;
    if (epsilon == 0.0) {
        n.spec.kind = NoiseKind::zero;
        const auto [r, c] = noise_shape(params, site);
        n.values = Matrix(r, c);
        return n;
    }
    n.spec.kind = NoiseKind::adversarial;
    n.values = scale_to_norm(noise_grad(params, users, profiles, site), epsilon);
    return n;
}

NoiseTensor make_gaussian_noise(const ModelParams& params, NoiseSite site, double epsilon,
                                RngStream& rng) {
    if (epsilon < 0.0) throw std::invalid_argument("make_gaussian_noise: epsilon must be >= 0");
    const auto [r, c] = noise_shape(params, site);
    NoiseTensor n;
    n.spec.site = site;
    n.spec.epsilon = epsilon;
    if (epsilon == 0.0) {
        n.spec.kind = NoiseKind::zero;
        n.values = Matrix(r, c);
        return n;
    }
    n.spec.kind = NoiseKind::gaussian;
    n.values = scale_to_norm(gaussian_fill(r, c, 1.0, rng), epsilon);
    return n;
}

}  // namespace acae
