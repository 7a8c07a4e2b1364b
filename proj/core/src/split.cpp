#include "acae/split.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace acae {

std::size_t SplitSpec::tested_user_count() const {
    std::size_t n = 0;
    for (const auto& h : held_out) n += h.has_value();
    return n;
}

SplitSpec split_leave_one_out(const BinaryDataset& ds, RngStream& rng, std::size_t n_neg) {
    if (n_neg < 1) throw std::invalid_argument("split_leave_one_out: n_neg must be >= 1");

    SplitSpec split;
    split.n_neg = n_neg;
    split.held_out.resize(ds.user_count);
    split.negatives.resize(ds.user_count);

    std::vector<char> rated(ds.item_count, 0);
    std::vector<std::uint32_t> pool;

    for (std::uint32_t u = 0; u < ds.user_count; ++u) {
        const auto& items = ds.positives[u];
        if (items.size() < 2) continue;  // single positive stays in training

        std::size_t pick = 0;
        if (ds.has_timestamps) {
            const auto& ts = ds.timestamps[u];
            for (std::size_t i = 1; i < items.size(); ++i) {
                // Latest timestamp wins; on ties the larger item index does.
                if (ts[i] > ts[pick] || (ts[i] == ts[pick] && items[i] > items[pick])) pick = i;
            }
        } else {
            pick = static_cast<std::size_t>(rng.next_below(items.size()));
        }
        split.held_out[u] = items[pick];

        // Candidate pool: the item universe minus everything the user rated
        // (training positives and the held-out item alike).
        for (std::uint32_t it : items) rated[it] = 1;
        pool.clear();
        for (std::uint32_t it = 0; it < ds.item_count; ++it) {
            if (!rated[it]) pool.push_back(it);
        }
        for (std::uint32_t it : items) rated[it] = 0;

        const std::size_t take = std::min(n_neg, pool.size());
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        split.negatives[u].assign(pool.begin(), pool.begin() + take);
    }
    return split;
}

std::vector<std::vector<std::uint32_t>> training_positives(const BinaryDataset& ds,
                                                           const SplitSpec& split) {
    std::vector<std::vector<std::uint32_t>> train(ds.user_count);
    for (std::uint32_t u = 0; u < ds.user_count; ++u) {
        if (!split.held_out[u]) {
            train[u] = ds.positives[u];
            continue;
        }
        const std::uint32_t held = *split.held_out[u];
        train[u].reserve(ds.positives[u].size() - 1);
        for (std::uint32_t it : ds.positives[u]) {
            if (it != held) train[u].push_back(it);
        }
    }
    return train;
}

BinaryDataset training_dataset(const BinaryDataset& ds, const SplitSpec& split) {
    BinaryDataset out = ds;
    for (std::uint32_t u = 0; u < ds.user_count; ++u) {
        if (!split.held_out[u]) continue;
        const std::uint32_t held = *split.held_out[u];
        std::vector<std::uint32_t> items;
        std::vector<std::int64_t> ts;
        items.reserve(ds.positives[u].size() - 1);
        for (std::size_t i = 0; i < ds.positives[u].size(); ++i) {
            if (ds.positives[u][i] == held) continue;
            items.push_back(ds.positives[u][i]);
            if (ds.has_timestamps) ts.push_back(ds.timestamps[u][i]);
        }
        out.positives[u] = std::move(items);
        if (ds.has_timestamps) out.timestamps[u] = std::move(ts);
    }
    return out;
}

void save_split(const SplitSpec& split, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep LF on every platform
    if (!out) throw std::runtime_error("cannot write split file: " + path.string());
    out << "acae-split v1 seed=" << split.seed << "\n";
    for (std::uint32_t u = 0; u < split.held_out.size(); ++u) {
        if (!split.held_out[u]) continue;
        out << u << '\t' << *split.held_out[u] << '\t';
        const auto& negs = split.negatives[u];
        for (std::size_t i = 0; i < negs.size(); ++i) {
            if (i) out << ',';
            out << negs[i];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing split file: " + path.string());
}

namespace {

std::uint32_t parse_u32_or_throw(const std::string& s, const char* what) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error(std::string("split file: bad ") + what + ": '" + s + "'");
    }
    return v;
}

}  // namespace

SplitSpec load_split(const std::filesystem::path& path, const BinaryDataset& ds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open split file: " + path.string());

    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("split file is empty: " + path.string());
    if (!header.empty() && header.back() == '\r') header.pop_back();

    SplitSpec split;
    {
        std::istringstream hs(header);
        std::string tag, version, seed_kv;
        hs >> tag >> version >> seed_kv;
        if (tag != "acae-split" || version != "v1" || seed_kv.rfind("seed=", 0) != 0) {
            throw std::runtime_error("split file: bad header '" + header + "'");
        }
        split.seed = std::stoull(seed_kv.substr(5));
    }
    split.held_out.resize(ds.user_count);
    split.negatives.resize(ds.user_count);

    std::string line;
    std::size_t line_no = 1;
    std::size_t max_negs = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::istringstream ls(line);
        std::string user_s, held_s, negs_s;
        if (!std::getline(ls, user_s, '\t') || !std::getline(ls, held_s, '\t') ||
            !std::getline(ls, negs_s)) {
            throw std::runtime_error("split file line " + std::to_string(line_no) +
                                     ": expected three tab-separated fields");
        }
        const std::uint32_t u = parse_u32_or_throw(user_s, "user index");
        if (u >= ds.user_count) {
            throw std::runtime_error("split file line " + std::to_string(line_no) +
                                     ": user index " + user_s + " out of range");
        }
        const std::uint32_t held = parse_u32_or_throw(held_s, "held-out index");
        const auto& pos = ds.positives[u];
        if (!std::binary_search(pos.begin(), pos.end(), held)) {
            throw std::runtime_error("split file line " + std::to_string(line_no) +
                                     ": held-out item is not a positive of user " + user_s);
        }
        split.held_out[u] = held;

        std::vector<std::uint32_t> negs;
        std::size_t pos_in = 0;
        while (pos_in <= negs_s.size() && !negs_s.empty()) {
            std::size_t next = negs_s.find(',', pos_in);
            const std::string tok =
                negs_s.substr(pos_in, next == std::string::npos ? next : next - pos_in);
            const std::uint32_t n = parse_u32_or_throw(tok, "negative index");
            if (n >= ds.item_count || std::binary_search(pos.begin(), pos.end(), n)) {
                throw std::runtime_error("split file line " + std::to_string(line_no) +
                                         ": invalid negative " + tok);
            }
            negs.push_back(n);
            if (next == std::string::npos) break;
            pos_in = next + 1;
        }
        max_negs = std::max(max_negs, negs.size());
        split.negatives[u] = std::move(negs);
    }
    split.n_neg = max_negs;
    return split;
}

}  // namespace acae
