#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "acae/gradients.hpp"
#include "acae/model.hpp"
#include "acae/split.hpp"

namespace acae {

/// Averaged leave-one-out ranking metrics at one or more cutoffs.
struct EvalReport {
    std::vector<std::size_t> ns;  // ascending cutoffs
    std::vector<double> hr;      // aligned with ns
    std::vector<double> ndcg;
    std::size_t tested_users = 0;

    double hr_at(std::size_t n) const;
    double ndcg_at(std::size_t n) const;
};

/// 1 iff the held-out item appears in the ranked list.
int hit(std::span<const std::uint32_t> ranklist, std::uint32_t held_out);

/// Position-discounted credit for a single relevant item: 1/log2(pos + 1)
/// with 1-based position, 0 when absent.
double ndcg_at(std::span<const std::uint32_t> ranklist, std::uint32_t held_out);

inline constexpr std::size_t kDefaultNs[] = {5, 10};

/// Scores {held-out} + negatives per tested user with the user's training
/// profile as input, ranks, and averages hit/NDCG over tested users. An
/// optional noise tensor perturbs every scoring pass (robustness probes).
EvalReport evaluate(const ModelParams& params, const BinaryDataset& ds, const SplitSpec& split,
                    std::span<const std::size_t> ns = kDefaultNs,
                    const NoiseTensor* noise = nullptr);

/// Non-personalized popularity baseline: items scored by their training-set
/// interaction count (held-out interactions excluded), evaluated through the
/// same ranking pipeline.
EvalReport itempop(const BinaryDataset& ds, const SplitSpec& split,
                   std::span<const std::size_t> ns = kDefaultNs);

struct RobustnessPoint {
    double epsilon = 0.0;
    double hr5 = 0.0;
    double ndcg5 = 0.0;
};

/// HR@5/NDCG@5 as a function of injected noise level at one site; the first
/// point is always the clean evaluation at epsilon = 0.
struct RobustnessCurve {
    NoiseSite site = NoiseSite::decoder_weights;
    NoiseKind kind = NoiseKind::adversarial;
    std::vector<RobustnessPoint> points;
};

/// Noise-impact study: one curve per (site, kind). Adversarial noise is the
/// fast-gradient tensor of the aggregate reconstruction loss over all tested
/// users' training profiles (deterministic, single-shot); Gaussian points
/// average `trials` independent draws.
std::vector<RobustnessCurve> noise_impact_probe(const ModelParams& params,
                                                const BinaryDataset& ds, const SplitSpec& split,
                                                std::span<const NoiseSite> sites,
                                                std::span<const NoiseKind> kinds,
                                                std::span<const double> eps_grid,
                                                std::size_t trials, RngStream& rng);

/// Adversarial robustness curve at a single site over an epsilon grid.
RobustnessCurve robustness_sweep(const ModelParams& params, const BinaryDataset& ds,
                                 const SplitSpec& split, NoiseSite site,
                                 std::span<const double> eps_grid);

}  // namespace acae
