#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acae/checkpoint.hpp"
#include "commands.hpp"

using namespace acae;
using namespace acae::cli;

int main(int argc, char** argv) {
    CLI::App app{"Adversarial collaborative auto-encoder for top-N recommendation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::vector<std::string> overrides;
    app.add_option("--config", config_file, "key=value experiment config file");
    app.add_option("--out", out_dir, "output directory (overrides config `out`)");
    app.add_option("--seed", seed, "master seed: split.seed, stage seeds derive from it")
        ->each([&](const std::string&) { have_seed = true; });
    app.add_option("--set", overrides, "override any config key, e.g. --set adv.epsilon=8");

    auto* prepare = app.add_subcommand("prepare", "ingest the raw log, write split + stats");

    auto* train = app.add_subcommand("train", "two-stage training; writes checkpoints + trace");
    TrainFlags train_flags;
    train->add_flag("--skip-pretrain", train_flags.skip_pretrain,
                    "reuse pre.ckpt (or cold-start) instead of pre-training");
    train->add_flag("--skip-adversarial", train_flags.skip_adversarial,
                    "stop after the pre-training stage");

    std::string ckpt;
    std::vector<std::size_t> eval_ns = {5, 10};
    auto* eval = app.add_subcommand("eval", "rank held-out items, write hr/ndcg report");
    eval->add_option("--ckpt", ckpt, "checkpoint to evaluate")->required();
    eval->add_option("--ns", eval_ns, "cutoffs, e.g. --ns 5 10");

    std::string site = "decoder_weights";
    std::vector<double> eps_grid = {0, 0.5, 1, 2, 4, 8, 15};
    auto* robustness =
        app.add_subcommand("robustness", "adversarial degradation curve at one site");
    robustness->add_option("--ckpt", ckpt, "checkpoint to attack")->required();
    robustness->add_option("--site", site,
                           "encoder_weights|decoder_weights|user_embedding|hidden_layer");
    robustness->add_option("--eps", eps_grid, "noise levels");

    std::size_t trials = 10;
    auto* probe = app.add_subcommand("probe", "gaussian vs adversarial impact at all sites");
    probe->add_option("--ckpt", ckpt, "checkpoint to probe")->required();
    probe->add_option("--eps", eps_grid, "noise levels");
    probe->add_option("--trials", trials, "gaussian draws per point");

    auto* itempop_cmd = app.add_subcommand("itempop", "popularity baseline report");

    std::vector<std::string> grids;
    std::string pre_ckpt;
    auto* sweep = app.add_subcommand("sweep", "grid of adversarial runs from one pre-checkpoint");
    sweep->add_option("--grid", grids, "axis spec, e.g. --grid adv.epsilon=0.5,1,2 (max twice)")
        ->required();
    sweep->add_option("--pre", pre_ckpt, "pre-trained checkpoint (default <out>/pre.ckpt)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (have_seed) overrides.insert(overrides.begin(), "seed=" + std::to_string(seed));
        ExperimentConfig cfg = load_config(config_file, overrides);
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        if (prepare->parsed()) cmd_prepare(cfg);
        else if (train->parsed()) cmd_train(cfg, train_flags);
        else if (eval->parsed()) cmd_eval(cfg, ckpt, eval_ns);
        else if (robustness->parsed()) cmd_robustness(cfg, ckpt, site, eps_grid);
        else if (probe->parsed()) cmd_probe(cfg, ckpt, eps_grid, trials);
        else if (itempop_cmd->parsed()) cmd_itempop(cfg);
        else if (sweep->parsed()) cmd_sweep(cfg, grids, pre_ckpt);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CheckpointError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
