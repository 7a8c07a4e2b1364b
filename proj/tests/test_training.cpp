#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "acae/checkpoint.hpp"
#include "acae/split.hpp"
#include "acae/training.hpp"
#include "synthetic.hpp"

using namespace acae;

namespace {

struct Fixture {
    BinaryDataset ds;
    SplitSpec split;

    explicit Fixture(std::uint64_t seed = 21) {
        synth::Options opt;
        opt.users = 48;
        opt.items = 96;
        opt.seed = 11;
        ds = synth::make_dataset(opt);
        RngStream rng(seed);
        split = split_leave_one_out(ds, rng, 40);
        split.seed = seed;
    }
};

bool same_params(const ModelParams& a, const ModelParams& b) {
    return a.w1.values == b.w1.values && a.w2.values == b.w2.values &&
           a.b1.values == b.b1.values && a.b2.values == b.b2.values && a.p.values == b.p.values;
}

}  // namespace

TEST_CASE("init_params determinism and the zero-std edge") {
    RngStream r0(3);
    const ModelParams zero = init_params(3, 5, 2, Activation::sigmoid, Activation::identity,
                                         0.0, r0);
    CHECK(frobenius_norm(zero.w1) == 0.0);
    CHECK(frobenius_norm(zero.p) == 0.0);

    RngStream a(4), b(4);
    const ModelParams pa = init_params(3, 5, 2, Activation::sigmoid, Activation::identity, 0.01, a);
    const ModelParams pb = init_params(3, 5, 2, Activation::sigmoid, Activation::identity, 0.01, b);
    CHECK(same_params(pa, pb));
}

TEST_CASE("init_params moments are sane at n = 1e5") {
    RngStream rng(5);
    const double std_dev = 0.05;
    const ModelParams p = init_params(100, 100, 10, Activation::sigmoid, Activation::identity,
                                      std_dev, rng);
    double sum = 0.0, sum_sq = 0.0;
    const std::size_t n = p.w1.size() + p.w2.size();  // 2e5 draws
    for (double x : p.w1.values) { sum += x; sum_sq += x * x; }
    for (double x : p.w2.values) { sum += x; sum_sq += x * x; }
    const double mean = sum / static_cast<double>(n);
    const double var = sum_sq / static_cast<double>(n) - mean * mean;
    CHECK(std::fabs(mean) < 4.0 * std_dev / std::sqrt(static_cast<double>(n)));
    CHECK(std::sqrt(var) == doctest::Approx(std_dev).epsilon(0.02));
}

TEST_CASE("epoch_batches is a permutation partition") {
    RngStream rng(6);
    const auto batches = epoch_batches(10, 3, rng);
    REQUIRE(batches.size() == 4);
    CHECK(batches[0].size() == 3);
    CHECK(batches[3].size() == 1);
    std::vector<char> seen(10, 0);
    for (const auto& b : batches) {
        for (std::uint32_t u : b) {
            CHECK(!seen[u]);
            seen[u] = 1;
        }
    }
    RngStream r1(7), r2(7);
    CHECK(epoch_batches(10, 3, r1) == epoch_batches(10, 3, r2));
}

TEST_CASE("max_epochs 0 returns the initial params with an empty trace") {
    const Fixture fx;
    PretrainConfig cfg;
    cfg.max_epochs = 0;
    cfg.seed = 9;
    const TrainResult res = pretrain(fx.ds, fx.split, {8}, cfg);
    CHECK(res.trace.empty());

    RngStream rng(9);
    const ModelParams want = init_params(fx.ds.user_count, fx.ds.item_count, 8,
                                         Activation::sigmoid, Activation::identity,
                                         cfg.init_std, rng);
    CHECK(same_params(res.params, want));
}

TEST_CASE("pretrain is deterministic and lowers the loss") {
    const Fixture fx;
    PretrainConfig cfg;
    cfg.max_epochs = 8;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.003;
    cfg.gamma = 0.0;
    cfg.seed = 13;

    const TrainResult a = pretrain(fx.ds, fx.split, {8}, cfg);
    const TrainResult b = pretrain(fx.ds, fx.split, {8}, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].loss == b.trace[i].loss);
        CHECK(a.trace[i].hr5 == b.trace[i].hr5);
    }
    CHECK(same_params(a.params, b.params));

    REQUIRE(a.trace.size() == 8);
    CHECK(a.trace.back().loss < a.trace.front().loss);
}

TEST_CASE("adversarial training with zero epsilon and lambdas equals plain Adagrad") {
    const Fixture fx;

    // Common starting point.
    RngStream init_rng(77);
    const ModelParams start = init_params(fx.ds.user_count, fx.ds.item_count, 6,
                                          Activation::sigmoid, Activation::identity, 0.01,
                                          init_rng);

    AdvConfig cfg;
    cfg.epsilon = 0.0;
    cfg.lambdas = {0.0, 0.0, 0.0, 0.0};
    cfg.batch_size = 16;
    cfg.max_epochs = 3;
    cfg.eval_every = 4;  // > max_epochs: no evaluation interferes
    cfg.seed = 31;
    const double gamma = 0.005;

    const TrainResult adv = adversarial_train(start, fx.ds, fx.split, cfg, gamma);

    // Reference: hand-rolled Adagrad fine-tuning over the same batches and
    // training profiles.
    ModelParams ref = start;
    const BinaryDataset train_ds = training_dataset(fx.ds, fx.split);
    RngStream val_rng(fx.split.seed + 1);
    SplitSpec val_split = split_leave_one_out(train_ds, val_rng, fx.split.n_neg);
    const Profiles train_profiles = training_positives(train_ds, val_split);

    AdagradState accum = make_adagrad_state(ref);
    RngStream rng(cfg.seed);
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        for (const auto& batch : epoch_batches(fx.ds.user_count, cfg.batch_size, rng)) {
            const ParamGrads grads = backprop(ref, batch, train_profiles, {}, gamma);
            apply_adagrad(ref, accum, grads, cfg.adagrad_base_rate);
        }
    }
    CHECK(same_params(adv.params, ref));
}

TEST_CASE("minimax sanity: adversarial noise does not lower the batch loss at small eps") {
    const Fixture fx;
    RngStream rng(41);
    const ModelParams params = init_params(fx.ds.user_count, fx.ds.item_count, 6,
                                           Activation::sigmoid, Activation::identity, 0.3, rng);
    const Profiles profiles = training_positives(fx.ds, fx.split);
    std::vector<std::uint32_t> batch;
    for (std::uint32_t u = 0; u < 16; ++u) batch.push_back(u);

    for (NoiseSite site : kAllNoiseSites) {
        const NoiseTensor adv = make_adversarial_noise(params, batch, profiles, site, 1e-3);
        const NoiseTerm term[] = {{&adv, 1.0}};
        NoiseTensor zero = adv;
        zero.values = Matrix(adv.values.rows, adv.values.cols);
        const NoiseTerm zero_term[] = {{&zero, 1.0}};
        CHECK(batch_loss(params, batch, profiles, term, 0.0) >=
              batch_loss(params, batch, profiles, zero_term, 0.0));
    }
}

TEST_CASE("accumulators never decrease across adversarial steps") {
    const Fixture fx;
    RngStream rng(43);
    ModelParams params = init_params(fx.ds.user_count, fx.ds.item_count, 4,
                                     Activation::sigmoid, Activation::identity, 0.05, rng);
    const Profiles profiles = training_positives(fx.ds, fx.split);
    AdagradState accum = make_adagrad_state(params);
    Matrix prev_w2 = accum.w2;
    std::vector<std::uint32_t> batch = {0, 1, 2, 3, 4, 5, 6, 7};
    for (int step = 0; step < 5; ++step) {
        const ParamGrads grads = backprop(params, batch, profiles, {}, 0.001);
        apply_adagrad(params, accum, grads, 0.05);
        for (std::size_t i = 0; i < accum.w2.size(); ++i) {
            CHECK(accum.w2.values[i] >= prev_w2.values[i]);
        }
        prev_w2 = accum.w2;
    }
}

TEST_CASE("divergence aborts with a diagnostic") {
    const Fixture fx;
    PretrainConfig cfg;
    cfg.max_epochs = 50;
    cfg.batch_size = 8;
    cfg.learning_rate = 1e5;  // guaranteed blow-up with identity encoder
    cfg.gamma = 0.0;
    cfg.init_std = 0.5;
    cfg.seed = 3;
    ModelConfig model{4, Activation::identity, Activation::identity};
    try {
        pretrain(fx.ds, fx.split, model, cfg);
        FAIL("expected TrainingDivergence");
    } catch (const TrainingDivergence& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epoch") != std::string::npos);
        CHECK(msg.find("learning rate") != std::string::npos);
        REQUIRE(!e.trace.empty());
        CHECK(!std::isfinite(e.trace.back().loss));
    }
}

TEST_CASE("checkpoint round trip is bit exact") {
    RngStream rng(51);
    const ModelParams p = init_params(7, 13, 3, Activation::identity, Activation::sigmoid,
                                      0.2, rng);
    const auto path = std::filesystem::temp_directory_path() / "acae_ckpt_test.bin";
    save_checkpoint(p, path);
    const ModelParams q = load_checkpoint(path);
    CHECK(q.user_count == 7);
    CHECK(q.item_count == 13);
    CHECK(q.hidden_dim == 3);
    CHECK(q.encoder_act == Activation::identity);
    CHECK(q.decoder_act == Activation::sigmoid);
    CHECK(same_params(p, q));
}

TEST_CASE("checkpoint load failures are structured") {
    RngStream rng(52);
    const ModelParams p = init_params(4, 6, 2, Activation::sigmoid, Activation::identity,
                                      0.1, rng);
    const auto dir = std::filesystem::temp_directory_path();

    SUBCASE("truncated payload names expected and actual byte counts") {
        const auto path = dir / "acae_ckpt_trunc.bin";
        save_checkpoint(p, path);
        const auto full = std::filesystem::file_size(path);
        std::filesystem::resize_file(path, full - 16);
        try {
            load_checkpoint(path);
            FAIL("expected CheckpointError");
        } catch (const CheckpointError& e) {
            const std::string msg = e.what();
            CHECK(msg.find(std::to_string(full)) != std::string::npos);
            CHECK(msg.find(std::to_string(full - 16)) != std::string::npos);
        }
    }

    SUBCASE("version mismatch names both versions") {
        const auto path = dir / "acae_ckpt_ver.bin";
        save_checkpoint(p, path);
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const std::uint32_t bogus = 9;
        f.write(reinterpret_cast<const char*>(&bogus), sizeof(bogus));
        f.close();
        try {
            load_checkpoint(path);
            FAIL("expected CheckpointError");
        } catch (const CheckpointError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("9") != std::string::npos);
            CHECK(msg.find("1") != std::string::npos);
        }
    }

    SUBCASE("bad magic is rejected") {
        const auto path = dir / "acae_ckpt_magic.bin";
        std::ofstream out(path, std::ios::binary);
        out << "NOPE this is not a checkpoint";
        out.close();
        CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_checkpoint(dir / "acae_no_such.bin"), CheckpointError);
    }
}

TEST_CASE("best snapshot achieves the maximum recorded validation hr5") {
    const Fixture fx;
    PretrainConfig cfg;
    cfg.max_epochs = 6;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.003;
    cfg.seed = 19;
    const TrainResult res = pretrain(fx.ds, fx.split, {8}, cfg);
    REQUIRE(!res.trace.empty());
    double best = -1.0;
    for (const auto& row : res.trace) best = std::max(best, row.hr5);

    // Re-evaluate the returned snapshot against the same validation split.
    const BinaryDataset train_ds = training_dataset(fx.ds, fx.split);
    RngStream val_rng(fx.split.seed + 1);
    const SplitSpec val_split = split_leave_one_out(train_ds, val_rng, fx.split.n_neg);
    const EvalReport rep = evaluate(res.params, train_ds, val_split);
    CHECK(rep.hr_at(5) == doctest::Approx(best).epsilon(1e-12));
}
