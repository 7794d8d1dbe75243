#include "hran/train.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "hran/errors.hpp"
#include "hran/rng.hpp"
#include "hran/textio.hpp"

namespace hran {

namespace {

std::vector<Vec*> tensor_list(ModelTensors& t) {
    std::vector<Vec*> out;
    visit_tensors(t, [&out](const std::string&, Vec& v) { out.push_back(&v); });
    return out;
}

std::vector<const Vec*> tensor_list(const ModelTensors& t) {
    std::vector<const Vec*> out;
    visit_tensors(const_cast<ModelTensors&>(t),
                  [&out](const std::string&, const Vec& v) { out.push_back(&v); });
    return out;
}

}  // namespace

void validate_config(const TrainConfig& cfg) {
    if (cfg.epochs < 0) throw validation_error("epochs must be nonnegative");
    if (!(cfg.lr0 > 0.0)) throw validation_error("lr0 must be positive");
    if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 > 0.0 && cfg.beta2 < 1.0)) {
        throw validation_error("adam betas must lie in (0,1)");
    }
    if (!(cfg.adam_epsilon > 0.0)) throw validation_error("adam epsilon must be positive");
    if (!(cfg.lr_decay_factor > 0.0 && cfg.lr_decay_factor <= 1.0)) {
        throw validation_error("lr decay factor must lie in (0,1]");
    }
    if (cfg.lr_decay_every <= 0) throw validation_error("lr decay interval must be positive");
}

OptimizerState make_optimizer(const ModelParams& params, const TrainConfig& cfg) {
    OptimizerState st;
    st.m = make_gradients(params);
    st.v = make_gradients(params);
    st.step = 0;
    st.beta1 = cfg.beta1;
    st.beta2 = cfg.beta2;
    st.epsilon = cfg.adam_epsilon;
    return st;
}

void adam_step(ModelParams& params, const Gradients& grads, OptimizerState& state,
               double lr) {
    auto theta = tensor_list(static_cast<ModelTensors&>(params));
    auto g = tensor_list(grads);
    auto m = tensor_list(state.m);
    auto v = tensor_list(state.v);

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    for (size_t t = 0; t < theta.size(); ++t) {
        if (g[t]->size() != theta[t]->size()) {
            throw validation_error("adam_step: gradient shape mismatch");
        }
        Vec& mt = *m[t];
        Vec& vt = *v[t];
        Vec& th = *theta[t];
        const Vec& gt = *g[t];
        for (size_t i = 0; i < th.size(); ++i) {
            mt[i] = state.beta1 * mt[i] + (1.0 - state.beta1) * gt[i];
            vt[i] = state.beta2 * vt[i] + (1.0 - state.beta2) * gt[i] * gt[i];
            const double mhat = mt[i] / bc1;
            const double vhat = vt[i] / bc2;
            th[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

double lr_at(int epoch, const TrainConfig& cfg) {
    if (epoch < 1) throw validation_error("epoch must be >= 1");
    const int steps = (epoch - 1) / cfg.lr_decay_every;
    return cfg.lr0 * std::pow(cfg.lr_decay_factor, static_cast<double>(steps));
}

std::pair<ModelParams, TrainLog> train(const std::vector<Session>& train_set,
                                       const std::vector<Session>& dev_set,
                                       const TrainConfig& cfg) {
    validate_config(cfg);
    if (train_set.empty() || dev_set.empty()) {
        throw validation_error("train: empty train or dev set");
    }

    ModelDims dims = cfg.dims;
    if (dims.feature_dim == 0) dims.feature_dim = train_set.front().feature_dim();

    std::vector<Session> train_norm, dev_norm;
    std::vector<Label> train_labels, dev_labels;
    for (const Session& s : train_set) {
        if (!s.label) throw validation_error("train: unlabeled session '" + s.id + "'");
        validate_session(s, dims.feature_dim);
        train_labels.push_back(*s.label);
        train_norm.push_back(normalized_copy(s));
    }
    for (const Session& s : dev_set) {
        if (!s.label) throw validation_error("train: unlabeled dev session '" + s.id + "'");
        validate_session(s, dims.feature_dim);
        dev_labels.push_back(*s.label);
        dev_norm.push_back(normalized_copy(s));
    }

    ModelParams params = init_params(dims, cfg.flags, derive_seed(cfg.seed, 1));
    OptimizerState opt = make_optimizer(params, cfg);
    Rng shuffle_rng(derive_seed(cfg.seed, 2));

    TrainLog log;
    ModelParams best = params;
    double best_acc = -1.0;

    std::vector<size_t> order(train_norm.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const double lr = lr_at(epoch, cfg);
        shuffle_rng.shuffle(order);

        double total_loss = 0.0;
        for (size_t idx : order) {
            const ForwardTrace trace = forward(train_norm[idx], params);
            total_loss += loss(trace, train_labels[idx]);
            const Gradients grads = backward(train_norm[idx], params, trace,
                                             train_labels[idx]);
            adam_step(params, grads, opt, lr);
        }

        size_t correct = 0;
        for (size_t j = 0; j < dev_norm.size(); ++j) {
            if (predict(forward(dev_norm[j], params)) == dev_labels[j]) ++correct;
        }
        const double dev_acc = static_cast<double>(correct) /
                               static_cast<double>(dev_norm.size());

        log.epochs.push_back({lr, total_loss / static_cast<double>(train_norm.size()),
                              dev_acc});
        if (dev_acc > best_acc) {
            best_acc = dev_acc;
            best = params;
            log.best_epoch = epoch;
        }
    }

    return {cfg.epochs > 0 ? std::move(best) : std::move(params), std::move(log)};
}

void write_train_log(const std::string& path, const TrainLog& log) {
    std::ostringstream out;
    out << "epoch\tlr\ttrain_loss\tdev_acc\n";
    for (size_t e = 0; e < log.epochs.size(); ++e) {
        const EpochLog& row = log.epochs[e];
        out << (e + 1) << "\t" << fmt_double(row.lr) << "\t" << fmt_double(row.train_loss)
            << "\t" << fmt_double(row.dev_accuracy) << "\n";
    }
    out << "best_epoch\t" << (log.best_epoch ? std::to_string(*log.best_epoch) : "none")
        << "\n";
    write_file_atomic(path, out.str());
}

}  // namespace hran
