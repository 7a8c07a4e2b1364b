#include "acae/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace acae {

BinarizeMode parse_binarize_mode(const std::string& name) {
    if (name == "above_is_one") return BinarizeMode::above_is_one;
    if (name == "keep_above_drop_rest") return BinarizeMode::keep_above_drop_rest;
    throw std::invalid_argument("unknown binarize mode: " + name);
}

BinaryDataset binarize(const InteractionLog& log, double keep_threshold, BinarizeMode) {
    BinaryDataset ds;

    // Raw counts over the whole log, positives or not.
    std::unordered_map<std::string, std::uint32_t> raw_users;
    for (const Interaction& rec : log.records) {
        raw_users.try_emplace(rec.user, static_cast<std::uint32_t>(raw_users.size()));
        if (ds.item_index.try_emplace(rec.item, static_cast<std::uint32_t>(ds.item_ids.size()))
                .second) {
            ds.item_ids.push_back(rec.item);
        }
    }
    ds.raw_user_count = raw_users.size();
    ds.raw_item_count = ds.item_ids.size();
    ds.raw_rating_count = log.records.size();
    ds.item_count = ds.item_ids.size();

    ds.has_timestamps =
        std::all_of(log.records.begin(), log.records.end(),
                    [](const Interaction& r) { return r.timestamp.has_value(); }) &&
        !log.records.empty();

    // Users keep their first-appearance order, restricted to raters with at
    // least one positive.
    for (const Interaction& rec : log.records) {
        if (rec.rating <= keep_threshold) continue;
        if (ds.user_index.try_emplace(rec.user, static_cast<std::uint32_t>(ds.user_ids.size()))
                .second) {
            ds.user_ids.push_back(rec.user);
        }
    }
    ds.user_count = ds.user_ids.size();
    ds.positives.resize(ds.user_count);
    if (ds.has_timestamps) ds.timestamps.resize(ds.user_count);

    for (const Interaction& rec : log.records) {
        if (rec.rating <= keep_threshold) continue;
        const std::uint32_t u = ds.user_index.at(rec.user);
        const std::uint32_t i = ds.item_index.at(rec.item);
        ds.positives[u].push_back(i);
        if (ds.has_timestamps) ds.timestamps[u].push_back(*rec.timestamp);
    }

    // Sort each profile by item index, keeping timestamps aligned, and drop
    // duplicate pairs (the earliest-timestamped copy wins).
    for (std::uint32_t u = 0; u < ds.user_count; ++u) {
        auto& items = ds.positives[u];
        std::vector<std::size_t> order(items.size());
        std::iota(order.begin(), order.end(), 0);
        if (ds.has_timestamps) {
            const auto& ts = ds.timestamps[u];
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (items[a] != items[b]) return items[a] < items[b];
                return ts[a] < ts[b];
            });
        } else {
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return items[a] < items[b]; });
        }
        std::vector<std::uint32_t> sorted_items;
        std::vector<std::int64_t> sorted_ts;
        sorted_items.reserve(items.size());
        for (std::size_t idx : order) {
            if (!sorted_items.empty() && sorted_items.back() == items[idx]) continue;
            sorted_items.push_back(items[idx]);
            if (ds.has_timestamps) sorted_ts.push_back(ds.timestamps[u][idx]);
        }
        ds.positives[u] = std::move(sorted_items);
        if (ds.has_timestamps) ds.timestamps[u] = std::move(sorted_ts);
    }

    // Report raters that lost every rating to the threshold.
    std::set<std::string> dropped;
    for (const Interaction& rec : log.records) {
        if (!ds.user_index.contains(rec.user)) dropped.insert(rec.user);
    }
    ds.dropped_users.assign(dropped.begin(), dropped.end());
    return ds;
}

DatasetStats dataset_stats(const BinaryDataset& ds) {
    DatasetStats s;
    s.users = ds.raw_user_count;
    s.items = ds.raw_item_count;
    s.ratings = ds.raw_rating_count;
    const double cells = static_cast<double>(s.users) * static_cast<double>(s.items);
    s.sparsity_pct = cells > 0.0 ? 100.0 * (1.0 - static_cast<double>(s.ratings) / cells) : 0.0;
    return s;
}

}  // namespace acae
