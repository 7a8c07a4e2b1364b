#include "acae/model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace acae {

Activation parse_activation(const std::string& name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "identity") return Activation::identity;
    throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(Activation act) {
    return act == Activation::sigmoid ? "sigmoid" : "identity";
}

NoiseSite parse_noise_site(const std::string& name) {
    if (name == "encoder_weights" || name == "encoder") return NoiseSite::encoder_weights;
    if (name == "decoder_weights" || name == "decoder") return NoiseSite::decoder_weights;
    if (name == "user_embedding" || name == "embedding") return NoiseSite::user_embedding;
    if (name == "hidden_layer" || name == "hidden") return NoiseSite::hidden_layer;
    throw std::invalid_argument("unknown noise site: " + name);
}

std::string to_string(NoiseSite site) {
    switch (site) {
        case NoiseSite::encoder_weights: return "encoder_weights";
        case NoiseSite::decoder_weights: return "decoder_weights";
        case NoiseSite::user_embedding: return "user_embedding";
        case NoiseSite::hidden_layer: return "hidden_layer";
    }
    return "?";
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::zero: return "zero";
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::adversarial: return "adversarial";
    }
    return "?";
}

ModelParams make_params(std::size_t users, std::size_t items, std::size_t hidden,
                        Activation encoder_act, Activation decoder_act) {
    ModelParams p;
    p.user_count = users;
    p.item_count = items;
    p.hidden_dim = hidden;
    p.encoder_act = encoder_act;
    p.decoder_act = decoder_act;
    p.w1 = Matrix(hidden, items);
    p.w2 = Matrix(items, hidden);
    p.b1 = Matrix(hidden, 1);
    p.b2 = Matrix(items, 1);
    p.p = Matrix(hidden, users);
    return p;
}

void validate_shapes(const ModelParams& m) {
    const auto expect = [](const Matrix& t, std::size_t r, std::size_t c, const char* name) {
        if (t.rows != r || t.cols != c) {
            std::ostringstream msg;
            msg << "model parameter " << name << " has shape " << t.rows << "x" << t.cols
                << ", expected " << r << "x" << c;
            throw std::invalid_argument(msg.str());
        }
    };
    expect(m.w1, m.hidden_dim, m.item_count, "W1");
    expect(m.w2, m.item_count, m.hidden_dim, "W2");
    expect(m.b1, m.hidden_dim, 1, "b1");
    expect(m.b2, m.item_count, 1, "b2");
    expect(m.p, m.hidden_dim, m.user_count, "P");
}

std::pair<std::size_t, std::size_t> noise_shape(const ModelParams& params, NoiseSite site) {
    switch (site) {
        case NoiseSite::encoder_weights: return {params.hidden_dim, params.item_count};
        case NoiseSite::decoder_weights: return {params.item_count, params.hidden_dim};
        case NoiseSite::user_embedding:
        case NoiseSite::hidden_layer: return {params.hidden_dim, 1};
    }
    throw std::invalid_argument("noise_shape: bad site");
}

namespace {

void check_noise(const ModelParams& params, const NoiseTensor* noise) {
    if (!noise) return;
    const auto [r, c] = noise_shape(params, noise->spec.site);
    if (noise->values.rows != r || noise->values.cols != c) {
        std::ostringstream msg;
        msg << "noise tensor for site " << to_string(noise->spec.site) << " has shape "
            << noise->values.rows << "x" << noise->values.cols << ", expected " << r << "x" << c;
        throw std::invalid_argument(msg.str());
    }
}

// Shared kernel: input given as (index, weight) pairs over the I coordinates.
ForwardTrace forward_weighted(const ModelParams& m, std::uint32_t user,
                              std::span<const std::pair<std::uint32_t, double>> input,
                              const NoiseTensor* noise) {
    check_noise(m, noise);
    if (user >= m.user_count) throw std::invalid_argument("forward: user index out of range");

    const std::size_t K = m.hidden_dim;
    const std::size_t I = m.item_count;
    const NoiseSite site = noise ? noise->spec.site : NoiseSite::encoder_weights;
    const bool n_enc = noise && site == NoiseSite::encoder_weights;
    const bool n_dec = noise && site == NoiseSite::decoder_weights;
    const bool n_emb = noise && site == NoiseSite::user_embedding;
    const bool n_hid = noise && site == NoiseSite::hidden_layer;

    ForwardTrace t;
    t.z1 = Matrix(K, 1);
    for (std::size_t k = 0; k < K; ++k) t.z1.values[k] = m.b1.values[k] + m.p(k, user);
    if (n_emb) {
        for (std::size_t k = 0; k < K; ++k) t.z1.values[k] += noise->values.values[k];
    }
    for (const auto& [idx, w] : input) {
        if (idx >= I) throw std::invalid_argument("forward: item index out of range");
        for (std::size_t k = 0; k < K; ++k) t.z1.values[k] += m.w1(k, idx) * w;
        if (n_enc) {
            for (std::size_t k = 0; k < K; ++k) t.z1.values[k] += noise->values(k, idx) * w;
        }
    }

    t.h = Matrix(K, 1);
    for (std::size_t k = 0; k < K; ++k) t.h.values[k] = activate(m.encoder_act, t.z1.values[k]);
    if (n_hid) {
        for (std::size_t k = 0; k < K; ++k) t.h.values[k] += noise->values.values[k];
    }

    t.logits = Matrix(I, 1);
    for (std::size_t i = 0; i < I; ++i) {
        const double* row = &m.w2.values[i * K];
        double acc = m.b2.values[i];
        for (std::size_t k = 0; k < K; ++k) acc += row[k] * t.h.values[k];
        if (n_dec) {
            const double* nrow = &noise->values.values[i * K];
            for (std::size_t k = 0; k < K; ++k) acc += nrow[k] * t.h.values[k];
        }
        t.logits.values[i] = acc;
    }
    return t;
}

}  // namespace

ForwardTrace forward(const ModelParams& params, std::uint32_t user, const Matrix& y_u,
                     const NoiseTensor* noise, const InputCorruption* corruption) {
    if (y_u.cols != 1 || y_u.rows != params.item_count) {
        throw std::invalid_argument("forward: input vector must be I x 1");
    }
    std::vector<std::pair<std::uint32_t, double>> input;
    for (std::uint32_t i = 0; i < y_u.rows; ++i) {
        if (y_u.values[i] != 0.0) input.emplace_back(i, y_u.values[i]);
    }
    if (corruption && corruption->drop_prob > 0.0) {
        if (!corruption->rng) throw std::invalid_argument("forward: corruption needs an rng");
        if (corruption->drop_prob >= 1.0) {
            throw std::invalid_argument("forward: drop_prob must be < 1");
        }
        const double keep_scale = 1.0 / (1.0 - corruption->drop_prob);
        std::vector<std::pair<std::uint32_t, double>> kept;
        kept.reserve(input.size());
        for (auto& [idx, w] : input) {
            if (corruption->rng->next_double() >= corruption->drop_prob) {
                kept.emplace_back(idx, w * keep_scale);
            }
        }
        input = std::move(kept);
    }
    return forward_weighted(params, user, input, noise);
}

ForwardTrace forward_sparse(const ModelParams& params, std::uint32_t user,
                            std::span<const std::uint32_t> items, const NoiseTensor* noise) {
    std::vector<std::pair<std::uint32_t, double>> input;
    input.reserve(items.size());
    for (std::uint32_t i : items) input.emplace_back(i, 1.0);
    return forward_weighted(params, user, input, noise);
}

Matrix score_user(const ModelParams& params, std::uint32_t user, const Matrix& y_u) {
    ForwardTrace t = forward(params, user, y_u);
    if (params.decoder_act == Activation::sigmoid) {
        for (double& v : t.logits.values) v = sigmoid(v);
    }
    return std::move(t.logits);
}

std::vector<std::uint32_t> rank_top_n(const Matrix& scores,
                                      std::span<const std::uint32_t> candidates, std::size_t n) {
    if (candidates.empty()) throw std::invalid_argument("rank_top_n: empty candidate set");
    if (n < 1) throw std::invalid_argument("rank_top_n: n must be >= 1");
    std::vector<std::uint32_t> ranked(candidates.begin(), candidates.end());
    const std::size_t take = std::min(n, ranked.size());
    const auto better = [&scores](std::uint32_t a, std::uint32_t b) {
        const double sa = scores.values[a];
        const double sb = scores.values[b];
        if (sa != sb) return sa > sb;
        return a < b;
    };
    std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end(), better);
    ranked.resize(take);
    return ranked;
}

double batch_loss(const ModelParams& params, std::span<const std::uint32_t> users,
                  const Profiles& profiles, std::span<const NoiseTerm> noise_terms,
                  double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("batch_loss: gamma must be >= 0");
    for (const NoiseTerm& term : noise_terms) {
        if (term.lambda < 0.0) throw std::invalid_argument("batch_loss: lambda must be >= 0");
        check_noise(params, term.noise);
    }

    const std::size_t I = params.item_count;
    std::vector<char> label(I, 0);
    double loss = 0.0;

    const auto user_term = [&](std::uint32_t u, const NoiseTensor* noise) {
        const ForwardTrace t = forward_sparse(params, u, profiles[u], noise);
        double sum = 0.0;
        for (std::size_t i = 0; i < I; ++i) {
            const double out = activate(params.decoder_act, t.logits.values[i]);
            sum += bce_with_logits(label[i] ? 1.0 : 0.0, out);
        }
        return sum;
    };

    for (std::uint32_t u : users) {
        if (u >= profiles.size()) throw std::invalid_argument("batch_loss: user out of range");
        for (std::uint32_t it : profiles[u]) label[it] = 1;
        loss += user_term(u, nullptr);
        for (const NoiseTerm& term : noise_terms) {
            if (term.lambda == 0.0) continue;
            loss += term.lambda * user_term(u, term.noise);
        }
        for (std::uint32_t it : profiles[u]) label[it] = 0;
    }

    if (gamma > 0.0) {
        const auto sq = [](const Matrix& m) {
            double s = 0.0;
            for (double x : m.values) s += x * x;
            return s;
        };
        loss += gamma * (sq(params.w1) + sq(params.w2) + sq(params.b1) + sq(params.b2) +
                         sq(params.p));
    }
    return loss;
}

}  // namespace acae
