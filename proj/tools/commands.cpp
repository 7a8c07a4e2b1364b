#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "acae/checkpoint.hpp"
#include "acae/evaluation.hpp"
#include "acae/split.hpp"
#include "acae/training.hpp"

namespace acae::cli {
namespace {

BinaryDataset ingest(const DatasetConfig& dc) {
    if (dc.path.empty()) throw ConfigError("dataset.path is not set");
    if (!std::filesystem::exists(dc.path)) {
        throw ConfigError("dataset file does not exist: " + dc.path);
    }
    const ColumnRoles roles = ColumnRoles::parse(dc.columns);
    InteractionLog log = parse_log(dc.path, dc.format, roles);
    if (!log.rejected_lines.empty()) {
        std::cerr << "warning: skipped " << log.rejected_lines.size()
                  << " malformed line(s); first at line " << log.rejected_lines.front() << "\n";
    }
    if (log.records.empty()) throw RuntimeFailure("dataset has no usable records: " + dc.path);
    if (dc.dedupe) {
        const std::size_t before = log.records.size();
        try {
            log = dedupe_earliest(log);
        } catch (const std::runtime_error& e) {
            throw ConfigError(std::string("dataset.dedupe: ") + e.what());
        }
        std::cerr << "dedupe: " << before << " -> " << log.records.size() << " records\n";
    }
    BinaryDataset ds = binarize(log, dc.threshold, dc.mode);
    if (!ds.dropped_users.empty()) {
        std::cerr << "binarize: dropped " << ds.dropped_users.size()
                  << " user(s) with no positive ratings\n";
    }
    if (ds.user_count == 0) throw RuntimeFailure("no users survive binarization");
    return ds;
}

std::filesystem::path out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / name;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // LF only, byte-reproducible
    if (!out) throw RuntimeFailure("cannot write " + path.string());
    out.precision(10);
    return out;
}

SplitSpec load_split_for(const ExperimentConfig& cfg, const BinaryDataset& ds) {
    const auto path = std::filesystem::path(cfg.out_dir) / "split.txt";
    if (!std::filesystem::exists(path)) {
        throw ConfigError("split file not found (run `prepare` first): " + path.string());
    }
    try {
        return load_split(path, ds);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
}

ModelParams load_model(const std::string& ckpt, const BinaryDataset& ds) {
    ModelParams params = load_checkpoint(ckpt);
    if (params.user_count != ds.user_count || params.item_count != ds.item_count) {
        std::ostringstream msg;
        msg << "checkpoint " << ckpt << " is shaped " << params.user_count << " users x "
            << params.item_count << " items, but the configured dataset has " << ds.user_count
            << " x " << ds.item_count;
        throw ConfigError(msg.str());
    }
    return params;
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& rep) {
    auto out = open_csv(path);
    out << "metric,n,value,users\n";
    for (std::size_t i = 0; i < rep.ns.size(); ++i) {
        out << "hr," << rep.ns[i] << ',' << rep.hr[i] << ',' << rep.tested_users << "\n";
    }
    for (std::size_t i = 0; i < rep.ns.size(); ++i) {
        out << "ndcg," << rep.ns[i] << ',' << rep.ndcg[i] << ',' << rep.tested_users << "\n";
    }
    std::cout << "wrote " << path.string() << "\n";
}

void write_curves_csv(const std::filesystem::path& path,
                      const std::vector<RobustnessCurve>& curves) {
    auto out = open_csv(path);
    out << "site,kind,epsilon,hr5,ndcg5\n";
    for (const auto& curve : curves) {
        for (const auto& pt : curve.points) {
            out << to_string(curve.site) << ',' << to_string(curve.kind) << ',' << pt.epsilon
                << ',' << pt.hr5 << ',' << pt.ndcg5 << "\n";
        }
    }
    std::cout << "wrote " << path.string() << "\n";
}

void append_trace(std::vector<TraceRow>& all, const std::vector<TraceRow>& stage) {
    all.insert(all.end(), stage.begin(), stage.end());
}

void write_trace_csv(const ExperimentConfig& cfg, const std::vector<TraceRow>& rows) {
    auto out = open_csv(out_path(cfg, "trace.csv"));
    out << "epoch,stage,loss,hr5,ndcg5,hr10,ndcg10\n";
    for (const TraceRow& r : rows) {
        out << r.epoch << ',' << r.stage << ',' << r.loss << ',' << r.hr5 << ',' << r.ndcg5
            << ',' << r.hr10 << ',' << r.ndcg10 << "\n";
    }
}

void echo_trace_row(const TraceRow& r) {
    std::cerr << "[" << r.stage << "] epoch " << r.epoch << " loss=" << r.loss
              << " hr5=" << r.hr5 << " ndcg5=" << r.ndcg5 << "\n";
}

// Best snapshot is what the checkpoint holds; the trailing mean over the
// last (up to) 100 validation passes is reported alongside it for
// convergence-averaged comparisons.
void print_stage_summary(const std::vector<TraceRow>& rows, const std::string& stage) {
    double best = -1.0, hr_sum = 0.0, ndcg_sum = 0.0;
    std::size_t n = 0;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        if (it->stage != stage) continue;
        best = std::max(best, it->hr5);
        if (n < 100) {
            hr_sum += it->hr5;
            ndcg_sum += it->ndcg5;
            ++n;
        }
    }
    if (n == 0) return;
    std::cout << stage << ": best validation hr5=" << best << ", trailing-" << n
              << " mean hr5=" << hr_sum / static_cast<double>(n)
              << " ndcg5=" << ndcg_sum / static_cast<double>(n) << "\n";
}

std::vector<double> parse_value_list(const std::string& key, const std::string& csv) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto next = csv.find(',', pos);
        const std::string tok = csv.substr(pos, next == std::string::npos ? next : next - pos);
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("grid " + key + ": bad value '" + tok + "'");
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (values.empty()) throw ConfigError("grid " + key + " has no values");
    return values;
}

}  // namespace

void cmd_prepare(const ExperimentConfig& cfg) {
    const BinaryDataset ds = ingest(cfg.dataset);
    const DatasetStats stats = dataset_stats(ds);

    RngStream rng(cfg.split.seed);
    SplitSpec split = split_leave_one_out(ds, rng, cfg.split.negatives);
    split.seed = cfg.split.seed;
    save_split(split, out_path(cfg, "split.txt"));

    {
        auto out = open_csv(out_path(cfg, "stats.csv"));
        out << "users,items,ratings,sparsity_pct\n";
        char sparsity[32];
        std::snprintf(sparsity, sizeof(sparsity), "%.2f", stats.sparsity_pct);
        out << stats.users << ',' << stats.items << ',' << stats.ratings << ',' << sparsity
            << "\n";
    }
    write_resolved_config(cfg);

    std::cout << "users=" << stats.users << " items=" << stats.items
              << " ratings=" << stats.ratings << " sparsity=" << stats.sparsity_pct << "%\n"
              << "tested users: " << split.tested_user_count() << "\n"
              << "wrote " << out_path(cfg, "split.txt").string() << "\n"
              << "wrote " << out_path(cfg, "stats.csv").string() << "\n";
}

void cmd_train(const ExperimentConfig& cfg, const TrainFlags& flags) {
    const BinaryDataset ds = ingest(cfg.dataset);
    const SplitSpec split = load_split_for(cfg, ds);
    write_resolved_config(cfg);

    std::vector<TraceRow> trace;
    ModelParams params;

    if (flags.skip_pretrain) {
        const auto pre_path = std::filesystem::path(cfg.out_dir) / "pre.ckpt";
        if (std::filesystem::exists(pre_path)) {
            params = load_model(pre_path.string(), ds);
            std::cout << "loaded " << pre_path.string() << "\n";
        } else {
            std::cerr << "warning: no pre-trained checkpoint at " << pre_path.string()
                      << "; adversarial training will cold-start from a random model\n";
            RngStream rng(cfg.pretrain.seed);
            params = init_params(ds.user_count, ds.item_count, cfg.model.hidden_dim,
                                 cfg.model.encoder_act, cfg.model.decoder_act,
                                 cfg.pretrain.init_std, rng);
        }
    } else {
        try {
            TrainResult pre = pretrain(ds, split, cfg.model, cfg.pretrain, echo_trace_row);
            append_trace(trace, pre.trace);
            params = std::move(pre.params);
        } catch (const TrainingDivergence& e) {
            append_trace(trace, e.trace);
            write_trace_csv(cfg, trace);
            throw RuntimeFailure(e.what());
        }
        save_checkpoint(params, out_path(cfg, "pre.ckpt"));
        std::cout << "wrote " << out_path(cfg, "pre.ckpt").string() << "\n";
    }

    if (!flags.skip_adversarial) {
        try {
            TrainResult adv =
                adversarial_train(std::move(params), ds, split, cfg.adversarial, cfg.gamma,
                                  echo_trace_row);
            append_trace(trace, adv.trace);
            params = std::move(adv.params);
        } catch (const TrainingDivergence& e) {
            append_trace(trace, e.trace);
            write_trace_csv(cfg, trace);
            throw RuntimeFailure(e.what());
        }
        save_checkpoint(params, out_path(cfg, "adv.ckpt"));
        std::cout << "wrote " << out_path(cfg, "adv.ckpt").string() << "\n";
    }

    write_trace_csv(cfg, trace);
    print_stage_summary(trace, "pretrain");
    print_stage_summary(trace, "adversarial");
    std::cout << "wrote " << out_path(cfg, "trace.csv").string() << "\n";
}

void cmd_eval(const ExperimentConfig& cfg, const std::string& ckpt,
              const std::vector<std::size_t>& ns) {
    const BinaryDataset ds = ingest(cfg.dataset);
    const SplitSpec split = load_split_for(cfg, ds);
    const ModelParams params = load_model(ckpt, ds);
    const EvalReport rep = evaluate(params, ds, split, ns);
    write_report_csv(out_path(cfg, "eval.csv"), rep);
    write_resolved_config(cfg);
}

void cmd_robustness(const ExperimentConfig& cfg, const std::string& ckpt,
                    const std::string& site, const std::vector<double>& eps_grid) {
    const BinaryDataset ds = ingest(cfg.dataset);
    const SplitSpec split = load_split_for(cfg, ds);
    const ModelParams params = load_model(ckpt, ds);
    const RobustnessCurve curve =
        robustness_sweep(params, ds, split, parse_noise_site(site), eps_grid);
    write_curves_csv(out_path(cfg, "robustness.csv"), {curve});
    write_resolved_config(cfg);
}

void cmd_probe(const ExperimentConfig& cfg, const std::string& ckpt,
               const std::vector<double>& eps_grid, std::size_t trials) {
    const BinaryDataset ds = ingest(cfg.dataset);
    const SplitSpec split = load_split_for(cfg, ds);
    const ModelParams params = load_model(ckpt, ds);
    const NoiseKind kinds[] = {NoiseKind::gaussian, NoiseKind::adversarial};
    RngStream rng(cfg.split.seed + 2);  // gaussian trials; derived, reproducible
    const auto curves =
        noise_impact_probe(params, ds, split, kAllNoiseSites, kinds, eps_grid, trials, rng);
    write_curves_csv(out_path(cfg, "probe.csv"), curves);
    write_resolved_config(cfg);
}

void cmd_itempop(const ExperimentConfig& cfg) {
    const BinaryDataset ds = ingest(cfg.dataset);
    const SplitSpec split = load_split_for(cfg, ds);
    const EvalReport rep = itempop(ds, split);
    write_report_csv(out_path(cfg, "itempop.csv"), rep);
    write_resolved_config(cfg);
}

void cmd_sweep(const ExperimentConfig& cfg, const std::vector<std::string>& grids,
               const std::string& pre_ckpt) {
    if (grids.empty() || grids.size() > 2) {
        throw ConfigError("sweep needs one or two --grid key=v1,v2,... arguments");
    }
    struct Axis {
        std::string key;
        std::vector<double> values;
    };
    std::vector<Axis> axes;
    for (const std::string& g : grids) {
        const auto eq = g.find('=');
        if (eq == std::string::npos) throw ConfigError("grid must be key=v1,v2,...: '" + g + "'");
        axes.push_back({g.substr(0, eq), parse_value_list(g.substr(0, eq), g.substr(eq + 1))});
    }

    const BinaryDataset ds = ingest(cfg.dataset);
    const SplitSpec split = load_split_for(cfg, ds);
    const std::string pre_path =
        pre_ckpt.empty() ? (std::filesystem::path(cfg.out_dir) / "pre.ckpt").string() : pre_ckpt;
    const ModelParams pre = load_model(pre_path, ds);
    write_resolved_config(cfg);

    auto out = open_csv(out_path(cfg, "sweep.csv"));
    out << "param,value,hr5,ndcg5\n";

    std::string param_name = axes[0].key;
    if (axes.size() == 2) param_name += "+" + axes[1].key;

    const auto format_value = [](double v) {
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };

    const std::size_t inner = axes.size() == 2 ? axes[1].values.size() : 1;
    for (std::size_t i = 0; i < axes[0].values.size(); ++i) {
        for (std::size_t j = 0; j < inner; ++j) {
            ExperimentConfig point = cfg;
            apply_override(point, axes[0].key, format_value(axes[0].values[i]));
            std::ostringstream value_label;
            value_label.precision(10);
            value_label << axes[0].values[i];
            if (axes.size() == 2) {
                apply_override(point, axes[1].key, format_value(axes[1].values[j]));
                value_label << "+" << axes[1].values[j];
            }

            TrainResult adv;
            try {
                adv = adversarial_train(pre, ds, split, point.adversarial, point.gamma);
            } catch (const TrainingDivergence& e) {
                std::cerr << "sweep point " << value_label.str() << " diverged: " << e.what()
                          << "\n";
                out << param_name << ',' << value_label.str() << ",nan,nan\n";
                continue;
            }
            const EvalReport rep = evaluate(adv.params, ds, split);
            out << param_name << ',' << value_label.str() << ',' << rep.hr_at(5) << ','
                << rep.ndcg_at(5) << "\n";
            std::cerr << "sweep " << param_name << "=" << value_label.str()
                      << " hr5=" << rep.hr_at(5) << "\n";
        }
    }
    std::cout << "wrote " << out_path(cfg, "sweep.csv").string() << "\n";
}

}  // namespace acae::cli
