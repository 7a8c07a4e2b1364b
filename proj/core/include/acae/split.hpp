#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "acae/dataset.hpp"
#include "acae/rng.hpp"

namespace acae {

/// Leave-one-out partition. Users with a single positive keep it for
/// training and carry no test entry.
struct SplitSpec {
    std::uint64_t seed = 0;
    std::size_t n_neg = 200;

    /// Indexed by dense user id; nullopt means the user is not tested.
    std::vector<std::optional<std::uint32_t>> held_out;
    /// Sampled negative candidates for tested users; empty otherwise.
    std::vector<std::vector<std::uint32_t>> negatives;

    bool tested(std::uint32_t user) const { return held_out[user].has_value(); }
    std::size_t tested_user_count() const;
};

/// Holds out each user's latest-timestamped positive (ties broken by larger
/// item index), or a seeded uniform pick when the dataset has no timestamps.
/// Negatives are drawn uniformly without replacement from the items the user
/// never rated, truncated to the available pool.
SplitSpec split_leave_one_out(const BinaryDataset& ds, RngStream& rng, std::size_t n_neg = 200);

/// Per-user training profiles: positives minus the held-out item.
std::vector<std::vector<std::uint32_t>> training_positives(const BinaryDataset& ds,
                                                           const SplitSpec& split);

/// Dataset restricted to training profiles (timestamps realigned); used to
/// draw the validation split from training data only.
BinaryDataset training_dataset(const BinaryDataset& ds, const SplitSpec& split);

/// Text format: header "acae-split v1 seed=<u64>", then one line per tested
/// user: "<user_idx>\t<held_out_idx>\t<neg,neg,...>".
void save_split(const SplitSpec& split, const std::filesystem::path& path);

/// Loads and validates a split against the dataset it was built from.
/// Throws std::runtime_error on format or consistency violations.
SplitSpec load_split(const std::filesystem::path& path, const BinaryDataset& ds);

}  // namespace acae
