#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace acae::cli {

/// Failure while running an otherwise valid configuration; exit code 1.
struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainFlags {
    bool skip_pretrain = false;
    bool skip_adversarial = false;
};

// Each command writes its outputs (and config.resolved) under cfg.out_dir.
void cmd_prepare(const ExperimentConfig& cfg);
void cmd_train(const ExperimentConfig& cfg, const TrainFlags& flags);
void cmd_eval(const ExperimentConfig& cfg, const std::string& ckpt,
              const std::vector<std::size_t>& ns);
void cmd_robustness(const ExperimentConfig& cfg, const std::string& ckpt,
                    const std::string& site, const std::vector<double>& eps_grid);
void cmd_probe(const ExperimentConfig& cfg, const std::string& ckpt,
               const std::vector<double>& eps_grid, std::size_t trials);
void cmd_itempop(const ExperimentConfig& cfg);
void cmd_sweep(const ExperimentConfig& cfg, const std::vector<std::string>& grids,
               const std::string& pre_ckpt);

}  // namespace acae::cli
