#include "acae/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acae {

double EvalReport::hr_at(std::size_t n) const {
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] == n) return hr[i];
    }
    throw std::invalid_argument("EvalReport: no cutoff " + std::to_string(n));
}

double EvalReport::ndcg_at(std::size_t n) const {
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] == n) return ndcg[i];
    }
    throw std::invalid_argument("EvalReport: no cutoff " + std::to_string(n));
}

int hit(std::span<const std::uint32_t> ranklist, std::uint32_t held_out) {
    return std::find(ranklist.begin(), ranklist.end(), held_out) != ranklist.end() ? 1 : 0;
}

double ndcg_at(std::span<const std::uint32_t> ranklist, std::uint32_t held_out) {
    for (std::size_t pos = 0; pos < ranklist.size(); ++pos) {
        if (ranklist[pos] == held_out) {
            return 1.0 / std::log2(static_cast<double>(pos) + 2.0);
        }
    }
    return 0.0;
}

namespace {

// Shared metric pipeline over any per-user scoring function (scores indexed
// by item over the whole universe).
template <typename ScoreFn>
EvalReport run_eval(const BinaryDataset& ds, const SplitSpec& split,
                    std::span<const std::size_t> ns, ScoreFn&& score) {
    std::vector<std::size_t> cutoffs(ns.begin(), ns.end());
    std::sort(cutoffs.begin(), cutoffs.end());
    if (cutoffs.empty()) throw std::invalid_argument("evaluate: no cutoffs given");

    EvalReport report;
    report.ns = cutoffs;
    report.hr.assign(cutoffs.size(), 0.0);
    report.ndcg.assign(cutoffs.size(), 0.0);

    const std::size_t max_n = cutoffs.back();
    std::vector<std::uint32_t> candidates;

    for (std::uint32_t u = 0; u < ds.user_count; ++u) {
        if (!split.held_out[u]) continue;
        const std::uint32_t held = *split.held_out[u];

        candidates.clear();
        candidates.push_back(held);
        candidates.insert(candidates.end(), split.negatives[u].begin(),
                          split.negatives[u].end());

        const Matrix scores = score(u);
        const auto ranked = rank_top_n(scores, candidates, max_n);
        for (std::size_t c = 0; c < cutoffs.size(); ++c) {
            const std::size_t take = std::min(cutoffs[c], ranked.size());
            const std::span<const std::uint32_t> prefix(ranked.data(), take);
            report.hr[c] += hit(prefix, held);
            report.ndcg[c] += ndcg_at(prefix, held);
        }
        ++report.tested_users;
    }

    if (report.tested_users > 0) {
        for (std::size_t c = 0; c < cutoffs.size(); ++c) {
            report.hr[c] /= static_cast<double>(report.tested_users);
            report.ndcg[c] /= static_cast<double>(report.tested_users);
        }
    }
    return report;
}

}  // namespace

EvalReport evaluate(const ModelParams& params, const BinaryDataset& ds, const SplitSpec& split,
                    std::span<const std::size_t> ns, const NoiseTensor* noise) {
    if (params.user_count != ds.user_count || params.item_count != ds.item_count) {
        throw std::invalid_argument("evaluate: model shaped for " +
                                    std::to_string(params.user_count) + "x" +
                                    std::to_string(params.item_count) + " but dataset is " +
                                    std::to_string(ds.user_count) + "x" +
                                    std::to_string(ds.item_count));
    }
    const Profiles train = training_positives(ds, split);
    return run_eval(ds, split, ns, [&](std::uint32_t u) {
        ForwardTrace t = forward_sparse(params, u, train[u], noise);
        if (params.decoder_act == Activation::sigmoid) {
            for (double& v : t.logits.values) v = sigmoid(v);
        }
        return std::move(t.logits);
    });
}

EvalReport itempop(const BinaryDataset& ds, const SplitSpec& split,
                   std::span<const std::size_t> ns) {
    Matrix popularity(ds.item_count, 1);
    const Profiles train = training_positives(ds, split);
    for (const auto& items : train) {
        for (std::uint32_t it : items) popularity.values[it] += 1.0;
    }
    return run_eval(ds, split, ns, [&](std::uint32_t) { return popularity; });
}

namespace {

RobustnessPoint eval_point(const ModelParams& params, const BinaryDataset& ds,
                           const SplitSpec& split, double eps, const NoiseTensor* noise) {
    const std::size_t ns[] = {5};
    const EvalReport rep = evaluate(params, ds, split, ns, noise);
    return {eps, rep.hr_at(5), rep.ndcg_at(5)};
}

std::vector<std::uint32_t> tested_users(const SplitSpec& split) {
    std::vector<std::uint32_t> users;
    for (std::uint32_t u = 0; u < split.held_out.size(); ++u) {
        if (split.held_out[u]) users.push_back(u);
    }
    return users;
}

}  // namespace

std::vector<RobustnessCurve> noise_impact_probe(const ModelParams& params,
                                                const BinaryDataset& ds, const SplitSpec& split,
                                                std::span<const NoiseSite> sites,
                                                std::span<const NoiseKind> kinds,
                                                std::span<const double> eps_grid,
                                                std::size_t trials, RngStream& rng) {
    if (trials < 1) throw std::invalid_argument("noise_impact_probe: trials must be >= 1");

    const Profiles train = training_positives(ds, split);
    const auto users = tested_users(split);
    const RobustnessPoint clean = eval_point(params, ds, split, 0.0, nullptr);

    std::vector<RobustnessCurve> curves;
    for (NoiseSite site : sites) {
        for (NoiseKind kind : kinds) {
            if (kind == NoiseKind::zero) continue;
            RobustnessCurve curve;
            curve.site = site;
            curve.kind = kind;
            curve.points.push_back(clean);
            for (double eps : eps_grid) {
                if (eps == 0.0) continue;  // baseline already present
                if (kind == NoiseKind::adversarial) {
                    const NoiseTensor n = make_adversarial_noise(params, users, train, site, eps);
                    curve.points.push_back(eval_point(params, ds, split, eps, &n));
                } else {
                    RobustnessPoint avg{eps, 0.0, 0.0};
                    for (std::size_t t = 0; t < trials; ++t) {
                        const NoiseTensor n = make_gaussian_noise(params, site, eps, rng);
                        const RobustnessPoint pt = eval_point(params, ds, split, eps, &n);
                        avg.hr5 += pt.hr5;
                        avg.ndcg5 += pt.ndcg5;
                    }
                    avg.hr5 /= static_cast<double>(trials);
                    avg.ndcg5 /= static_cast<double>(trials);
                    curve.points.push_back(avg);
                }
            }
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

RobustnessCurve robustness_sweep(const ModelParams& params, const BinaryDataset& ds,
                                 const SplitSpec& split, NoiseSite site,
                                 std::span<const double> eps_grid) {
    const Profiles train = training_positives(ds, split);
    const auto users = tested_users(split);

    RobustnessCurve curve;
    curve.site = site;
    curve.kind = NoiseKind::adversarial;
    curve.points.push_back(eval_point(params, ds, split, 0.0, nullptr));
    for (double eps : eps_grid) {
        if (eps == 0.0) continue;
        const NoiseTensor n = make_adversarial_noise(params, users, train, site, eps);
        curve.points.push_back(eval_point(params, ds, split, eps, &n));
    }
    return curve;
}

}  // namespace acae
