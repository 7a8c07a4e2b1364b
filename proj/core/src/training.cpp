#include "acae/training.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "acae/optim.hpp"

namespace acae {

ModelParams init_params(std::size_t users, std::size_t items, std::size_t hidden,
                        Activation encoder_act, Activation decoder_act, double init_std,
                        RngStream& rng) {
    if (users < 1 || items < 1 || hidden < 1) {
        throw std::invalid_argument("init_params: dimensions must be >= 1");
    }
    ModelParams p = make_params(users, items, hidden, encoder_act, decoder_act);
    p.w1 = gaussian_fill(hidden, items, init_std, rng);
    p.w2 = gaussian_fill(items, hidden, init_std, rng);
    p.b1 = gaussian_fill(hidden, 1, init_std, rng);
    p.b2 = gaussian_fill(items, 1, init_std, rng);
    p.p = gaussian_fill(hidden, users, init_std, rng);
    return p;
}

std::vector<std::vector<std::uint32_t>> epoch_batches(std::size_t user_count,
                                                      std::size_t batch_size, RngStream& rng) {
    if (batch_size < 1) throw std::invalid_argument("epoch_batches: batch_size must be >= 1");
    std::vector<std::uint32_t> order(user_count);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<std::vector<std::uint32_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(start + batch_size, order.size());
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

AdagradState make_adagrad_state(const ModelParams& params) {
    AdagradState s;
    s.w1 = Matrix(params.w1.rows, params.w1.cols);
    s.w2 = Matrix(params.w2.rows, params.w2.cols);
    s.b1 = Matrix(params.b1.rows, params.b1.cols);
    s.b2 = Matrix(params.b2.rows, params.b2.cols);
    s.p = Matrix(params.p.rows, params.p.cols);
    return s;
}

void apply_sgd(ModelParams& params, const ParamGrads& grads, double learning_rate) {
    sgd_step(params.w1, grads.w1, learning_rate);
    sgd_step(params.w2, grads.w2, learning_rate);
    sgd_step(params.b1, grads.b1, learning_rate);
    sgd_step(params.b2, grads.b2, learning_rate);
    for (const auto& [u, col] : grads.p_cols) {
        for (std::size_t k = 0; k < params.hidden_dim; ++k) {
            params.p(k, u) -= learning_rate * col.values[k];
        }
    }
}

void apply_adagrad(ModelParams& params, AdagradState& state, const ParamGrads& grads,
                   double base_rate, double damping) {
    adagrad_step(params.w1, grads.w1, state.w1, base_rate, damping);
    adagrad_step(params.w2, grads.w2, state.w2, base_rate, damping);
    adagrad_step(params.b1, grads.b1, state.b1, base_rate, damping);
    adagrad_step(params.b2, grads.b2, state.b2, base_rate, damping);
    for (const auto& [u, col] : grads.p_cols) {
        for (std::size_t k = 0; k < params.hidden_dim; ++k) {
            const double g = col.values[k];
            if (g == 0.0) continue;
            double& acc = state.p(k, u);
            acc += g * g;
            params.p(k, u) -= base_rate * g / (std::sqrt(acc) + damping);
        }
    }
}

namespace {

// Shared two-stage loop machinery: validation split carved from the
// training data, per-epoch batches, best-snapshot early stopping.
struct LoopContext {
    BinaryDataset train_ds;      // full dataset minus test held-outs
    SplitSpec val_split;         // leave-one-out over train_ds
    Profiles train_profiles;     // train_ds minus validation held-outs
};

LoopContext make_loop_context(const BinaryDataset& ds, const SplitSpec& split) {
    LoopContext ctx;
    ctx.train_ds = training_dataset(ds, split);
    RngStream val_rng(split.seed + 1);
    ctx.val_split = split_leave_one_out(ctx.train_ds, val_rng,
                                        split.n_neg > 0 ? split.n_neg : 200);
    ctx.val_split.seed = split.seed + 1;
    ctx.train_profiles = training_positives(ctx.train_ds, ctx.val_split);
    return ctx;
}

struct EarlyStopper {
    double best_hr5 = -1.0;
    std::size_t stale = 0;

    // Returns true when training should stop.
    bool observe(double hr5, std::size_t patience) {
        if (hr5 > best_hr5) {
            best_hr5 = hr5;
            stale = 0;
            return false;
        }
        return ++stale >= patience;
    }
};

[[noreturn]] void throw_divergence(const char* stage, std::size_t epoch, double rate,
                                   double loss, std::vector<TraceRow> trace) {
    std::ostringstream msg;
    msg << stage << " diverged: non-finite loss (" << loss << ") at epoch " << epoch
        << " with learning rate " << rate;
    trace.push_back({epoch, stage, loss, 0.0, 0.0, 0.0, 0.0});
    throw TrainingDivergence(msg.str(), std::move(trace));
}

}  // namespace

TrainResult pretrain(const BinaryDataset& ds, const SplitSpec& split, const ModelConfig& model,
                     const PretrainConfig& cfg, const TraceCallback& on_eval) {
    if (cfg.learning_rate <= 0.0) throw std::invalid_argument("pretrain: learning_rate must be > 0");
    if (cfg.early_stop_patience < 1) throw std::invalid_argument("pretrain: patience must be >= 1");
    if (cfg.eval_every < 1) throw std::invalid_argument("pretrain: eval_every must be >= 1");

    RngStream rng(cfg.seed);
    TrainResult result;
    result.params = init_params(ds.user_count, ds.item_count, model.hidden_dim,
                                model.encoder_act, model.decoder_act, cfg.init_std, rng);
    if (cfg.max_epochs == 0) return result;

    const LoopContext ctx = make_loop_context(ds, split);
    ModelParams& params = result.params;
    ModelParams best = params;
    EarlyStopper stopper;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        double epoch_loss = 0.0;
        const auto batches = epoch_batches(ds.user_count, cfg.batch_size, rng);
        for (const auto& batch : batches) {
            double loss = 0.0;
            const ParamGrads grads =
                backprop(params, batch, ctx.train_profiles, {}, cfg.gamma, &loss);
            if (!std::isfinite(loss)) {
                throw_divergence("pretrain", epoch, cfg.learning_rate, loss,
                                 std::move(result.trace));
            }
            apply_sgd(params, grads, cfg.learning_rate);
            epoch_loss += loss;
        }
        if (epoch % cfg.eval_every != 0) continue;

        const EvalReport rep = evaluate(params, ctx.train_ds, ctx.val_split);
        result.trace.push_back({epoch, "pretrain", epoch_loss / static_cast<double>(batches.size()),
                                rep.hr_at(5), rep.ndcg_at(5), rep.hr_at(10), rep.ndcg_at(10)});
        if (on_eval) on_eval(result.trace.back());
        if (rep.hr_at(5) > stopper.best_hr5) best = params;
        if (stopper.observe(rep.hr_at(5), cfg.early_stop_patience)) break;
    }
    if (!result.trace.empty()) result.params = std::move(best);
    return result;
}

TrainResult adversarial_train(ModelParams params, const BinaryDataset& ds,
                              const SplitSpec& split, const AdvConfig& cfg, double gamma,
                              const TraceCallback& on_eval) {
    validate_shapes(params);
    if (params.user_count != ds.user_count || params.item_count != ds.item_count) {
        throw std::invalid_argument("adversarial_train: params do not match dataset shape");
    }
    if (cfg.epsilon < 0.0) throw std::invalid_argument("adversarial_train: epsilon must be >= 0");
    for (double l : cfg.lambdas) {
        if (l < 0.0) throw std::invalid_argument("adversarial_train: lambdas must be >= 0");
    }
    if (cfg.early_stop_patience < 1 || cfg.eval_every < 1) {
        throw std::invalid_argument("adversarial_train: patience and eval_every must be >= 1");
    }

    RngStream rng(cfg.seed);
    const LoopContext ctx = make_loop_context(ds, split);

    TrainResult result;
    result.params = std::move(params);
    ModelParams& theta = result.params;
    ModelParams best = theta;
    EarlyStopper stopper;
    AdagradState accum = make_adagrad_state(theta);

    std::vector<NoiseSite> active_sites;
    for (NoiseSite site : kAllNoiseSites) {
        if (cfg.lambda(site) > 0.0) active_sites.push_back(site);
    }

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        double epoch_loss = 0.0;
        const auto batches = epoch_batches(ds.user_count, cfg.batch_size, rng);
        for (const auto& batch : batches) {
            // Maximization: fresh fast-gradient noise per site, per batch.
            std::vector<NoiseTensor> noises;
            std::vector<NoiseTerm> terms;
            noises.reserve(active_sites.size());
            for (NoiseSite site : active_sites) {
                noises.push_back(
                    make_adversarial_noise(theta, batch, ctx.train_profiles, site, cfg.epsilon));
            }
            for (std::size_t s = 0; s < active_sites.size(); ++s) {
                terms.push_back({&noises[s], cfg.lambda(active_sites[s])});
            }

            // Minimization: one Adagrad step with the noise held fixed.
            double loss = 0.0;
            const ParamGrads grads =
                backprop(theta, batch, ctx.train_profiles, terms, gamma, &loss);
            if (!std::isfinite(loss)) {
                throw_divergence("adversarial", epoch, cfg.adagrad_base_rate, loss,
                                 std::move(result.trace));
            }
            apply_adagrad(theta, accum, grads, cfg.adagrad_base_rate);
            epoch_loss += loss;
        }
        if (epoch % cfg.eval_every != 0) continue;

        const EvalReport rep = evaluate(theta, ctx.train_ds, ctx.val_split);
        result.trace.push_back({epoch, "adversarial",
                                epoch_loss / static_cast<double>(batches.size()), rep.hr_at(5),
                                rep.ndcg_at(5), rep.hr_at(10), rep.ndcg_at(10)});
        if (on_eval) on_eval(result.trace.back());
        if (rep.hr_at(5) > stopper.best_hr5) best = theta;
        if (stopper.observe(rep.hr_at(5), cfg.early_stop_patience)) break;
    }
    if (!result.trace.empty()) result.params = std::move(best);
    return result;
}

}  // namespace acae
