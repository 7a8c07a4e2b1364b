#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "acae/interactions.hpp"

namespace acae {

/// Binarized implicit-feedback dataset. Users are the raters that kept at
/// least one positive after thresholding; the item universe is every item
/// seen in the raw log, so negative sampling covers items whose ratings all
/// fell below the threshold. Dense indices follow first appearance in the
/// log. Non-positive pairs are not stored; the loss treats them as 0.
struct BinaryDataset {
    std::size_t user_count = 0;
    std::size_t item_count = 0;

    std::vector<std::string> user_ids;  // dense index -> external id
    std::vector<std::string> item_ids;
    std::unordered_map<std::string, std::uint32_t> user_index;  // external id -> dense
    std::unordered_map<std::string, std::uint32_t> item_index;

    /// Per-user positive item indices, strictly sorted, duplicate-free.
    std::vector<std::vector<std::uint32_t>> positives;
    /// Timestamps aligned with positives; empty when the source had none.
    std::vector<std::vector<std::int64_t>> timestamps;
    bool has_timestamps = false;

    /// Raw-log counts recorded before thresholding; sparsity and the stats
    /// report are computed on these, not on the surviving positives.
    std::size_t raw_user_count = 0;
    std::size_t raw_item_count = 0;
    std::size_t raw_rating_count = 0;

    /// External ids of users whose ratings all fell below the threshold.
    std::vector<std::string> dropped_users;
};

/// Both modes keep exactly the pairs with rating > keep_threshold; they
/// differ only in how the source scale is documented (above_is_one maps the
/// rest to 0, keep_above_drop_rest discards them — the resulting positive
/// sets are identical).
enum class BinarizeMode { above_is_one, keep_above_drop_rest };

BinarizeMode parse_binarize_mode(const std::string& name);

BinaryDataset binarize(const InteractionLog& log, double keep_threshold, BinarizeMode mode);

struct DatasetStats {
    std::size_t users = 0;
    std::size_t items = 0;
    std::size_t ratings = 0;
    double sparsity_pct = 0.0;  // 1 - ratings / (users * items), in percent
};

/// Raw-log statistics carried by the dataset (pre-binarization counts).
DatasetStats dataset_stats(const BinaryDataset& ds);

}  // namespace acae
