#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "acae/dataset.hpp"
#include "acae/evaluation.hpp"
#include "acae/gradients.hpp"
#include "acae/model.hpp"
#include "acae/split.hpp"

namespace acae {

struct ModelConfig {
    std::size_t hidden_dim = 64;
    Activation encoder_act = Activation::sigmoid;
    Activation decoder_act = Activation::identity;
};

/// Stage one: mini-batch gradient descent at a fixed learning rate.
struct PretrainConfig {
    double learning_rate = 0.01;
    std::size_t batch_size = 128;
    std::size_t max_epochs = 500;
    double gamma = 1e-4;
    double init_std = 0.01;
    std::size_t eval_every = 1;           // epochs between validation passes
    std::size_t early_stop_patience = 10;  // evaluations without improvement
    std::uint64_t seed = 1;
};

/// Stage two: minimax training with Adagrad. lambdas are indexed by
/// NoiseSite; a zero entry disables that adversarial term.
struct AdvConfig {
    double epsilon = 1.0;
    std::array<double, 4> lambdas = {1.0, 1.0, 0.0, 0.0};
    double adagrad_base_rate = 0.01;
    std::size_t batch_size = 128;
    std::size_t max_epochs = 1000;
    std::size_t eval_every = 1;
    std::size_t early_stop_patience = 10;
    std::uint64_t seed = 2;

    double lambda(NoiseSite site) const { return lambdas[static_cast<std::size_t>(site)]; }
    double& lambda(NoiseSite site) { return lambdas[static_cast<std::size_t>(site)]; }
};

struct TraceRow {
    std::size_t epoch = 0;
    std::string stage;  // "pretrain" or "adversarial"
    double loss = 0.0;  // epoch mean batch loss
    double hr5 = 0.0, ndcg5 = 0.0, hr10 = 0.0, ndcg10 = 0.0;
};

struct TrainResult {
    ModelParams params;           // best-validation snapshot
    std::vector<TraceRow> trace;  // one row per validation pass
};

/// Invoked after each validation pass; useful for live progress output.
using TraceCallback = std::function<void(const TraceRow&)>;

/// Non-finite loss during an optimization loop. Carries the trace recorded
/// so far, ending in a diagnostic row for the failing epoch.
struct TrainingDivergence : std::runtime_error {
    TrainingDivergence(const std::string& msg, std::vector<TraceRow> rows)
        : std::runtime_error(msg), trace(std::move(rows)) {}
    std::vector<TraceRow> trace;
};

/// All tensors filled i.i.d. normal(0, init_std^2).
ModelParams init_params(std::size_t users, std::size_t items, std::size_t hidden,
                        Activation encoder_act, Activation decoder_act, double init_std,
                        RngStream& rng);

/// One epoch's batches: a seeded permutation of all users partitioned into
/// blocks of batch_size (last block may be short), so every user receives
/// exactly one update per epoch.
std::vector<std::vector<std::uint32_t>> epoch_batches(std::size_t user_count,
                                                      std::size_t batch_size, RngStream& rng);

/// Per-tensor Adagrad accumulators, shaped like the parameters.
struct AdagradState {
    Matrix w1, w2, b1, b2, p;
};
AdagradState make_adagrad_state(const ModelParams& params);

/// Fixed-rate gradient step on every tensor; embedding columns present in
/// the gradients are updated in place.
void apply_sgd(ModelParams& params, const ParamGrads& grads, double learning_rate);

/// Adagrad step on every tensor (see adagrad_step for the per-coordinate
/// rule). Embedding accumulators advance only at columns in the batch.
void apply_adagrad(ModelParams& params, AdagradState& state, const ParamGrads& grads,
                   double base_rate, double damping = 1e-8);

/// Stage one of the training procedure: initialize from a normal
/// distribution and run fixed-rate mini-batch descent on the unperturbed
/// loss, evaluating HR@5 on a validation split carved out of the training
/// data (seed = split.seed + 1). Returns the best-validation snapshot.
TrainResult pretrain(const BinaryDataset& ds, const SplitSpec& split, const ModelConfig& model,
                     const PretrainConfig& cfg, const TraceCallback& on_eval = {});

/// Stage two: per batch, construct fast-gradient adversarial noise at every
/// site with lambda > 0 (maximization), then take one Adagrad step on the
/// full loss with those noises held fixed (minimization). Evaluation cadence
/// and early stopping as in pretrain.
TrainResult adversarial_train(ModelParams params, const BinaryDataset& ds,
                              const SplitSpec& split, const AdvConfig& cfg, double gamma,
                              const TraceCallback& on_eval = {});

}  // namespace acae
