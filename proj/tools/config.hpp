#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "acae/dataset.hpp"
#include "acae/interactions.hpp"
#include "acae/training.hpp"

namespace acae::cli {

/// Bad usage or configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetConfig {
    std::string path;  // the only field without a default
    LogFormat format = LogFormat::double_colon;
    std::string columns = "user,item,rating,timestamp";
    double threshold = 3.0;
    BinarizeMode mode = BinarizeMode::above_is_one;
    bool dedupe = false;
};

struct SplitConfig {
    std::uint64_t seed = 42;
    std::size_t negatives = 200;
};

/// Full experiment description: one plain-text key=value file plus command
/// line overrides. Every run writes the resolved form next to its outputs.
struct ExperimentConfig {
    DatasetConfig dataset;
    SplitConfig split;
    ModelConfig model;
    PretrainConfig pretrain;
    AdvConfig adversarial;
    double gamma = 1e-4;
    std::string out_dir = "runs/default";
};

/// Parses a config file (empty path = all defaults), then applies overrides
/// of the form "key=value". A bare --seed N override sets split.seed = N and
/// derives stage seeds N+1, N+2 unless they were given explicitly.
ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::vector<std::string>& overrides);

/// Applies a single "key" = "value" assignment to an existing config.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Canonical serialization, one key per line in fixed order.
std::string serialize_config(const ExperimentConfig& cfg);

/// Writes serialize_config(cfg) to <out_dir>/config.resolved.
void write_resolved_config(const ExperimentConfig& cfg);

}  // namespace acae::cli
