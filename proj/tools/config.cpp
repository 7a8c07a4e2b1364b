#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace acae::cli {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size()) {
        throw ConfigError("config key " + key + ": not an unsigned integer: '" + value + "'");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key " + key + ": not a boolean: '" + value + "'");
}

struct KeyValues {
    std::map<std::string, std::string> map;

    bool has(const std::string& key) const { return map.contains(key); }
};

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "dataset.path") cfg.dataset.path = value;
        else if (key == "dataset.format") cfg.dataset.format = parse_log_format(value);
        else if (key == "dataset.columns") cfg.dataset.columns = value;
        else if (key == "dataset.threshold") cfg.dataset.threshold = to_double(key, value);
        else if (key == "dataset.binarize_mode") cfg.dataset.mode = parse_binarize_mode(value);
        else if (key == "dataset.dedupe") cfg.dataset.dedupe = to_bool(key, value);
        else if (key == "split.seed") cfg.split.seed = to_u64(key, value);
        else if (key == "split.negatives") cfg.split.negatives = to_u64(key, value);
        else if (key == "model.hidden_dim") cfg.model.hidden_dim = to_u64(key, value);
        else if (key == "model.encoder_activation") cfg.model.encoder_act = parse_activation(value);
        else if (key == "model.decoder_activation") cfg.model.decoder_act = parse_activation(value);
        else if (key == "pretrain.learning_rate") cfg.pretrain.learning_rate = to_double(key, value);
        else if (key == "pretrain.batch_size") cfg.pretrain.batch_size = to_u64(key, value);
        else if (key == "pretrain.max_epochs") cfg.pretrain.max_epochs = to_u64(key, value);
        else if (key == "pretrain.gamma") cfg.pretrain.gamma = to_double(key, value);
        else if (key == "pretrain.init_std") cfg.pretrain.init_std = to_double(key, value);
        else if (key == "pretrain.eval_every") cfg.pretrain.eval_every = to_u64(key, value);
        else if (key == "pretrain.patience") cfg.pretrain.early_stop_patience = to_u64(key, value);
        else if (key == "pretrain.seed") cfg.pretrain.seed = to_u64(key, value);
        else if (key == "adv.epsilon") cfg.adversarial.epsilon = to_double(key, value);
        else if (key == "adv.lambda_encoder")
            cfg.adversarial.lambda(NoiseSite::encoder_weights) = to_double(key, value);
        else if (key == "adv.lambda_decoder")
            cfg.adversarial.lambda(NoiseSite::decoder_weights) = to_double(key, value);
        else if (key == "adv.lambda_embedding")
            cfg.adversarial.lambda(NoiseSite::user_embedding) = to_double(key, value);
        else if (key == "adv.lambda_hidden")
            cfg.adversarial.lambda(NoiseSite::hidden_layer) = to_double(key, value);
        else if (key == "adv.base_rate") cfg.adversarial.adagrad_base_rate = to_double(key, value);
        else if (key == "adv.batch_size") cfg.adversarial.batch_size = to_u64(key, value);
        else if (key == "adv.max_epochs") cfg.adversarial.max_epochs = to_u64(key, value);
        else if (key == "adv.eval_every") cfg.adversarial.eval_every = to_u64(key, value);
        else if (key == "adv.patience") cfg.adversarial.early_stop_patience = to_u64(key, value);
        else if (key == "adv.seed") cfg.adversarial.seed = to_u64(key, value);
        else if (key == "gamma") cfg.gamma = to_double(key, value);
        else if (key == "out") cfg.out_dir = value;
        else throw ConfigError("unknown config key: " + key);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config key " + key + ": " + e.what());
    }
}

}  // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    apply_key(cfg, key, value);
}

ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::vector<std::string>& overrides) {
    KeyValues kv;

    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw ConfigError("cannot open config file: " + file.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped[0] == '#') continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + stripped + "'");
            }
            kv.map[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
        }
    }

    std::uint64_t global_seed = 0;
    bool have_global_seed = false;
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) throw ConfigError("override must be key=value: '" + ov + "'");
        const std::string key = trim(ov.substr(0, eq));
        const std::string value = trim(ov.substr(eq + 1));
        if (key == "seed") {
            global_seed = to_u64(key, value);
            have_global_seed = true;
        } else {
            kv.map[key] = value;
        }
    }
    if (have_global_seed) {
        kv.map["split.seed"] = std::to_string(global_seed);
        if (!kv.has("pretrain.seed")) kv.map["pretrain.seed"] = std::to_string(global_seed + 1);
        if (!kv.has("adv.seed")) kv.map["adv.seed"] = std::to_string(global_seed + 2);
    }

    ExperimentConfig cfg;
    bool have_pretrain_gamma = false;
    for (const auto& [key, value] : kv.map) {
        apply_key(cfg, key, value);
        if (key == "pretrain.gamma") have_pretrain_gamma = true;
    }
    if (!have_pretrain_gamma) cfg.pretrain.gamma = cfg.gamma;
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "dataset.path=" << cfg.dataset.path << "\n"
        << "dataset.format=" << to_string(cfg.dataset.format) << "\n"
        << "dataset.columns=" << cfg.dataset.columns << "\n"
        << "dataset.threshold=" << cfg.dataset.threshold << "\n"
        << "dataset.binarize_mode="
        << (cfg.dataset.mode == BinarizeMode::above_is_one ? "above_is_one"
                                                           : "keep_above_drop_rest")
        << "\n"
        << "dataset.dedupe=" << (cfg.dataset.dedupe ? "true" : "false") << "\n"
        << "split.seed=" << cfg.split.seed << "\n"
        << "split.negatives=" << cfg.split.negatives << "\n"
        << "model.hidden_dim=" << cfg.model.hidden_dim << "\n"
        << "model.encoder_activation=" << to_string(cfg.model.encoder_act) << "\n"
        << "model.decoder_activation=" << to_string(cfg.model.decoder_act) << "\n"
        << "pretrain.learning_rate=" << cfg.pretrain.learning_rate << "\n"
        << "pretrain.batch_size=" << cfg.pretrain.batch_size << "\n"
        << "pretrain.max_epochs=" << cfg.pretrain.max_epochs << "\n"
        << "pretrain.gamma=" << cfg.pretrain.gamma << "\n"
        << "pretrain.init_std=" << cfg.pretrain.init_std << "\n"
        << "pretrain.eval_every=" << cfg.pretrain.eval_every << "\n"
        << "pretrain.patience=" << cfg.pretrain.early_stop_patience << "\n"
        << "pretrain.seed=" << cfg.pretrain.seed << "\n"
        << "adv.epsilon=" << cfg.adversarial.epsilon << "\n"
        << "adv.lambda_encoder=" << cfg.adversarial.lambda(NoiseSite::encoder_weights) << "\n"
        << "adv.lambda_decoder=" << cfg.adversarial.lambda(NoiseSite::decoder_weights) << "\n"
        << "adv.lambda_embedding=" << cfg.adversarial.lambda(NoiseSite::user_embedding) << "\n"
        << "adv.lambda_hidden=" << cfg.adversarial.lambda(NoiseSite::hidden_layer) << "\n"
        << "adv.base_rate=" << cfg.adversarial.adagrad_base_rate << "\n"
        << "adv.batch_size=" << cfg.adversarial.batch_size << "\n"
        << "adv.max_epochs=" << cfg.adversarial.max_epochs << "\n"
        << "adv.eval_every=" << cfg.adversarial.eval_every << "\n"
        << "adv.patience=" << cfg.adversarial.early_stop_patience << "\n"
        << "adv.seed=" << cfg.adversarial.seed << "\n"
        << "gamma=" << cfg.gamma << "\n"
        << "out=" << cfg.out_dir << "\n";
    return out.str();
}

void write_resolved_config(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / "config.resolved";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << serialize_config(cfg);
}

}  // namespace acae::cli
