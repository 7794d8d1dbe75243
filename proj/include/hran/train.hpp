#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hran/corpus.hpp"
#include "hran/nn.hpp"

namespace hran {

struct TrainConfig {
    int epochs = 50;
    double lr0 = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double lr_decay_factor = 0.1;
    int lr_decay_every = 30;
    uint64_t seed = 1;
    ModelFlags flags;
    // feature_dim == 0 takes the dimension from the training data
    ModelDims dims{0, 64, 16};
};

void validate_config(const TrainConfig& cfg);

struct OptimizerState {
    Gradients m, v;
    int64_t step = 0;
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
};

OptimizerState make_optimizer(const ModelParams& params, const TrainConfig& cfg);

// One Adam update with bias correction; increments state.step once per call.
void adam_step(ModelParams& params, const Gradients& grads, OptimizerState& state,
               double lr);

// lr0 * decay^floor((epoch-1)/decay_every), epoch is 1-based.
double lr_at(int epoch, const TrainConfig& cfg);

struct EpochLog {
    double lr = 0.0;
    double train_loss = 0.0;
    double dev_accuracy = 0.0;
};

struct TrainLog {
    std::vector<EpochLog> epochs;
    std::optional<int> best_epoch;  // 1-based; empty when no epochs ran
};

// Per-session updates in seeded shuffled order; dev accuracy selects the
// returned snapshot (earliest epoch wins ties). Sessions are normalized
// per speaker within each session before use.
std::pair<ModelParams, TrainLog> train(const std::vector<Session>& train_set,
                                       const std::vector<Session>& dev_set,
                                       const TrainConfig& cfg);

// TSV: epoch, lr, train_loss, dev_acc rows plus a trailing best_epoch record.
void write_train_log(const std::string& path, const TrainLog& log);

}  // namespace hran
