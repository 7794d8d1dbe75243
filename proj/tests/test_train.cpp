#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "hran/corpus.hpp"
#include "hran/errors.hpp"
#include "hran/nn.hpp"
#include "hran/rng.hpp"
#include "hran/train.hpp"
#include "test_util.hpp"

using namespace hran;

namespace {

// Flatten every tensor into one vector for whole-model comparisons.
std::vector<double> flatten(const ModelParams& params) {
    std::vector<double> out;
    visit_tensors(const_cast<ModelParams&>(params),
                  [&](const std::string&, const Vec& v) {
                      out.insert(out.end(), v.begin(), v.end());
                  });
    return out;
}

std::vector<Session> toy_corpus(uint64_t seed, int n, size_t dim) {
    Rng rng(seed);
    std::vector<Session> out;
    for (int i = 0; i < n; ++i) {
        const Label lab = i % 2 == 0 ? Label::high : Label::low;
        Session s = testutil::random_session(rng, dim, 4, 1, 2, lab,
                                             "toy-" + std::to_string(i));
        // plant an easily separable within-session contrast on dim 0:
        // High sessions put the bump on even turns, Low on odd turns.
        for (size_t t = 0; t < s.turns.size(); ++t) {
            const bool bump = (t % 2 == 0) == (lab == Label::high);
            for (SubTurn& st : s.turns[t].sub_turns) {
                st.features[0] += bump ? 4.0 : -4.0;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST_CASE("adam leaves parameters unchanged on zero gradients except bookkeeping") {
    const ModelDims dims{2, 2, 2};
    TrainConfig cfg;
    ModelParams params = init_params(dims, ModelFlags{}, 3);
    const std::vector<double> before = flatten(params);

    OptimizerState state = make_optimizer(params, cfg);
    CHECK(state.step == 0);
    const Gradients zeros = make_gradients(params);
    adam_step(params, zeros, state, 0.1);
    CHECK(state.step == 1);
    CHECK(flatten(params) == before);
}

TEST_CASE("adam first and second steps match the hand-derived values") {
    // With theta=0 and g=1 everywhere: m_hat = 1, v_hat = 1, so the first
    // update is -lr / (1 + eps) ~= -lr. The second step with the same gradient
    // again gives m_hat = v_hat = 1, moving to -2 lr.
    const ModelDims dims{2, 2, 2};
    TrainConfig cfg;
    ModelParams params = make_params(dims, ModelFlags{});
    OptimizerState state = make_optimizer(params, cfg);
    Gradients grads = make_gradients(params);
    visit_tensors(grads, [](const std::string&, Vec& v) {
        std::fill(v.begin(), v.end(), 1.0);
    });

    adam_step(params, grads, state, 0.1);
    for (double x : flatten(params)) CHECK(x == doctest::Approx(-0.1).epsilon(1e-6));

    adam_step(params, grads, state, 0.1);
    for (double x : flatten(params)) CHECK(x == doctest::Approx(-0.2).epsilon(1e-6));
    CHECK(state.step == 2);
}

TEST_CASE("adam matches a scalar reference implementation over many steps") {
    const ModelDims dims{1, 1, 1};
    TrainConfig cfg;
    cfg.beta1 = 0.9;
    cfg.beta2 = 0.999;
    cfg.adam_epsilon = 1e-8;
    ModelParams params = make_params(dims, ModelFlags{});
    OptimizerState state = make_optimizer(params, cfg);

    // scalar oracle tracking one particular entry (b_out[0])
    double theta = 0.0, m = 0.0, v = 0.0;
    Rng rng(91);
    const double lr = 0.05;
    for (int t = 1; t <= 25; ++t) {
        const double g = rng.normal();
        Gradients grads = make_gradients(params);
        grads.b_out[0] = g;
        adam_step(params, grads, state, lr);

        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double m_hat = m / (1.0 - std::pow(0.9, t));
        const double v_hat = v / (1.0 - std::pow(0.999, t));
        theta -= lr * m_hat / (std::sqrt(v_hat) + 1e-8);

        CHECK(params.b_out[0] == doctest::Approx(theta).epsilon(1e-12));
    }
}

TEST_CASE("adam updates are bounded by a small multiple of the learning rate") {
    const ModelDims dims{3, 2, 2};
    TrainConfig cfg;
    ModelParams params = init_params(dims, ModelFlags{}, 8);
    OptimizerState state = make_optimizer(params, cfg);
    Rng rng(17);
    const double lr = 0.01;
    std::vector<double> prev = flatten(params);
    for (int t = 0; t < 10; ++t) {
        Gradients grads = make_gradients(params);
        visit_tensors(grads, [&](const std::string&, Vec& v) {
            for (double& x : v) x = 100.0 * rng.normal();
        });
        adam_step(params, grads, state, lr);
        const std::vector<double> cur = flatten(params);
        for (size_t i = 0; i < cur.size(); ++i) {
            CHECK(std::abs(cur[i] - prev[i]) <= 10.0 * lr);
        }
        prev = cur;
    }
}

TEST_CASE("adam rejects gradient shapes that do not match the model") {
    const ModelDims dims{2, 2, 2};
    TrainConfig cfg;
    ModelParams params = make_params(dims, ModelFlags{});
    OptimizerState state = make_optimizer(params, cfg);
    Gradients grads = make_gradients(make_params(ModelDims{3, 2, 2}, ModelFlags{}));
    CHECK_THROWS_AS(adam_step(params, grads, state, 0.1), validation_error);
}

TEST_CASE("learning rate schedule steps down by the decay factor") {
    TrainConfig cfg;  // lr0 1e-4, factor 0.1, every 30
    CHECK(lr_at(1, cfg) == doctest::Approx(1e-4));
    CHECK(lr_at(30, cfg) == doctest::Approx(1e-4));
    CHECK(lr_at(31, cfg) == doctest::Approx(1e-5));
    CHECK(lr_at(60, cfg) == doctest::Approx(1e-5));
    CHECK(lr_at(61, cfg) == doctest::Approx(1e-6));

    cfg.lr_decay_factor = 0.5;
    cfg.lr_decay_every = 2;
    cfg.lr0 = 1.0;
    CHECK(lr_at(1, cfg) == doctest::Approx(1.0));
    CHECK(lr_at(2, cfg) == doctest::Approx(1.0));
    CHECK(lr_at(3, cfg) == doctest::Approx(0.5));
    CHECK(lr_at(5, cfg) == doctest::Approx(0.25));
    CHECK_THROWS_AS(lr_at(0, cfg), validation_error);
}

TEST_CASE("config validation rejects out-of-range values") {
    TrainConfig good;
    CHECK_NOTHROW(validate_config(good));

    TrainConfig c = good;
    c.epochs = -1;
    CHECK_THROWS_AS(validate_config(c), validation_error);
    c = good;
    c.lr0 = 0.0;
    CHECK_THROWS_AS(validate_config(c), validation_error);
    c = good;
    c.beta1 = 1.0;
    CHECK_THROWS_AS(validate_config(c), validation_error);
    c = good;
    c.beta2 = -0.1;
    CHECK_THROWS_AS(validate_config(c), validation_error);
    c = good;
    c.adam_epsilon = 0.0;
    CHECK_THROWS_AS(validate_config(c), validation_error);
    c = good;
    c.lr_decay_factor = 1.5;
    CHECK_THROWS_AS(validate_config(c), validation_error);
    c = good;
    c.lr_decay_every = 0;
    CHECK_THROWS_AS(validate_config(c), validation_error);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const auto corpus = toy_corpus(5, 8, 6);
    const std::vector<Session> train_set(corpus.begin(), corpus.begin() + 6);
    const std::vector<Session> dev_set(corpus.begin() + 6, corpus.end());

    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.lr0 = 1e-3;
    cfg.seed = 42;
    cfg.dims = ModelDims{0, 4, 2};

    const auto [m1, log1] = train(train_set, dev_set, cfg);
    const auto [m2, log2] = train(train_set, dev_set, cfg);

    CHECK(flatten(m1) == flatten(m2));
    REQUIRE(log1.epochs.size() == log2.epochs.size());
    for (size_t e = 0; e < log1.epochs.size(); ++e) {
        CHECK(log1.epochs[e].train_loss == log2.epochs[e].train_loss);
        CHECK(log1.epochs[e].dev_accuracy == log2.epochs[e].dev_accuracy);
        CHECK(log1.epochs[e].lr == log2.epochs[e].lr);
    }
    CHECK(log1.best_epoch == log2.best_epoch);

    // a different seed changes the outcome
    cfg.seed = 43;
    const auto [m3, log3] = train(train_set, dev_set, cfg);
    CHECK(flatten(m3) != flatten(m1));
}

TEST_CASE("zero epochs returns the untouched initialization and an empty log") {
    const auto corpus = toy_corpus(6, 4, 5);
    const std::vector<Session> train_set(corpus.begin(), corpus.begin() + 2);
    const std::vector<Session> dev_set(corpus.begin() + 2, corpus.end());

    TrainConfig cfg;
    cfg.epochs = 0;
    cfg.dims = ModelDims{0, 3, 2};
    const auto [model, log] = train(train_set, dev_set, cfg);
    CHECK(log.epochs.empty());
    CHECK_FALSE(log.best_epoch.has_value());

    const ModelParams fresh =
        init_params(ModelDims{5, 3, 2}, cfg.flags, derive_seed(cfg.seed, 1));
    CHECK(flatten(model) == flatten(fresh));
}

TEST_CASE("loss decreases on an easy separable problem") {
    const auto corpus = toy_corpus(7, 10, 6);
    const std::vector<Session> train_set(corpus.begin(), corpus.begin() + 8);
    const std::vector<Session> dev_set(corpus.begin() + 8, corpus.end());

    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.lr0 = 0.01;
    cfg.seed = 9;
    cfg.dims = ModelDims{0, 4, 2};
    const auto [model, log] = train(train_set, dev_set, cfg);
    REQUIRE(log.epochs.size() == 20);
    CHECK(log.epochs.back().train_loss < log.epochs.front().train_loss);
}

TEST_CASE("the returned snapshot attains the best logged dev accuracy") {
    const auto corpus = toy_corpus(8, 10, 5);
    const std::vector<Session> train_set(corpus.begin(), corpus.begin() + 7);
    const std::vector<Session> dev_set(corpus.begin() + 7, corpus.end());

    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.lr0 = 5e-3;
    cfg.seed = 31;
    cfg.dims = ModelDims{0, 4, 2};
    const auto [model, log] = train(train_set, dev_set, cfg);

    double best = 0.0;
    for (const EpochLog& e : log.epochs) best = std::max(best, e.dev_accuracy);
    REQUIRE(log.best_epoch.has_value());
    const int bi = *log.best_epoch;
    REQUIRE(bi >= 1);
    REQUIRE(static_cast<size_t>(bi) <= log.epochs.size());
    CHECK(log.epochs[static_cast<size_t>(bi - 1)].dev_accuracy == doctest::Approx(best));
    // earliest epoch wins ties
    for (int e = 1; e < bi; ++e) {
        CHECK(log.epochs[static_cast<size_t>(e - 1)].dev_accuracy < best);
    }

    // re-score the returned snapshot against dev by hand
    int correct = 0;
    for (const Session& s : dev_set) {
        const Session norm = normalized_copy(s);
        if (predict(forward(norm, model)) == *s.label) ++correct;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(dev_set.size());
    CHECK(acc == doctest::Approx(best));
}

TEST_CASE("training rejects degenerate inputs") {
    const auto corpus = toy_corpus(10, 4, 5);
    const std::vector<Session> train_set(corpus.begin(), corpus.begin() + 2);
    const std::vector<Session> dev_set(corpus.begin() + 2, corpus.end());
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.dims = ModelDims{0, 3, 2};

    CHECK_THROWS_AS(train({}, dev_set, cfg), validation_error);
    CHECK_THROWS_AS(train(train_set, {}, cfg), validation_error);

    auto unlabeled = train_set;
    unlabeled[0].label.reset();
    CHECK_THROWS_AS(train(unlabeled, dev_set, cfg), validation_error);
}

TEST_CASE("train log serialization format") {
    TrainLog log;
    log.epochs.push_back({1e-4, 0.6931, 0.5});
    log.epochs.push_back({1e-4, 0.5, 0.75});
    log.best_epoch = 2;

    const std::string dir = testutil::scratch_dir("train_log");
    const std::string path = dir + "/log.tsv";
    write_train_log(path, log);
    const std::string text = testutil::slurp(path);

    CHECK(text.rfind("epoch\tlr\ttrain_loss\tdev_acc\n", 0) == 0);
    CHECK(text.find("\nbest_epoch\t2\n") != std::string::npos);
    CHECK(text.find("0.75") != std::string::npos);

    TrainLog empty;
    write_train_log(path, empty);
    CHECK(testutil::slurp(path) == "epoch\tlr\ttrain_loss\tdev_acc\nbest_epoch\tnone\n");
}
