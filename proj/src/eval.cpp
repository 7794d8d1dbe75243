#include "hran/eval.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <thread>

#include "hran/errors.hpp"
#include "hran/rng.hpp"
#include "hran/textio.hpp"

namespace hran {

ModelFlags flags_for(Variant v) {
    switch (v) {
        case Variant::hrn:   return {false, false};
        case Variant::hrsan: return {true, false};
        case Variant::hrtan: return {false, true};
        case Variant::hran:  return {true, true};
    }
    throw validation_error("unknown variant");
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::hrn:   return "hrn";
        case Variant::hrsan: return "hrsan";
        case Variant::hrtan: return "hrtan";
        case Variant::hran:  return "hran";
    }
    throw validation_error("unknown variant");
}

Variant variant_from_name(const std::string& name) {
    for (Variant v : {Variant::hrn, Variant::hrsan, Variant::hrtan, Variant::hran}) {
        if (name == variant_name(v)) return v;
    }
    throw validation_error("unknown variant '" + name +
                           "' (expected hrn|hrsan|hrtan|hran)");
}

std::vector<std::string> FoldPlan::train_ids(int fold) const {
    std::vector<std::string> out;
    for (int g = 0; g < k; ++g) {
        if (g == fold || g == (fold + 1) % k) continue;
        out.insert(out.end(), groups[g].begin(), groups[g].end());
    }
    return out;
}

FoldPlan make_folds(const std::vector<Session>& sessions, int k, uint64_t seed) {
    if (k < 3) throw validation_error("make_folds: need k >= 3 (train/dev/test)");
    if (sessions.size() < static_cast<size_t>(k)) {
        throw validation_error("make_folds: fewer sessions than folds");
    }

    std::vector<std::string> highs, lows;
    for (const Session& s : sessions) {
        if (!s.label) throw validation_error("make_folds: unlabeled session '" + s.id + "'");
        (*s.label == Label::high ? highs : lows).push_back(s.id);
    }
    if (highs.empty() || lows.empty()) {
        throw validation_error("make_folds: corpus contains only one class");
    }

    Rng rng(derive_seed(seed, 0xF01D));
    rng.shuffle(highs);
    rng.shuffle(lows);

    // Deal the concatenated (highs then lows) list round-robin. Consecutive
    // positions land in consecutive groups, so both per-group sizes and
    // per-group label counts differ by at most one.
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.groups.resize(k);
    size_t pos = 0;
    for (const std::string& id : highs) plan.groups[pos++ % k].push_back(id);
    for (const std::string& id : lows) plan.groups[pos++ % k].push_back(id);
    return plan;
}

EvalResult evaluate(const ModelParams& model, const std::vector<Session>& sessions) {
    EvalResult res;
    for (const Session& s : sessions) {
        if (!s.label) throw validation_error("evaluate: unlabeled session '" + s.id + "'");
        const ForwardTrace trace = forward(normalized_copy(s), model);
        const Label pred = predict(trace);
        res.confusion[static_cast<int>(*s.label)][static_cast<int>(pred)] += 1;
        res.predictions.push_back({s.id, *s.label, pred, {trace.p[0], trace.p[1]}});
    }
    const long total = static_cast<long>(sessions.size());
    if (total > 0) {
        res.accuracy = static_cast<double>(res.confusion[0][0] + res.confusion[1][1]) /
                       static_cast<double>(total);
    }
    return res;
}

namespace {

std::vector<Session> pick_sessions(const std::map<std::string, const Session*>& by_id,
                                   const std::vector<std::string>& ids) {
    std::vector<Session> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw validation_error("fold plan references unknown session '" + id + "'");
        }
        out.push_back(*it->second);
    }
    return out;
}

}  // namespace

CvResult run_cv(const std::vector<Session>& sessions, const FoldPlan& plan,
                const TrainConfig& config, int parallel) {
    if (plan.k < 3 || plan.groups.size() != static_cast<size_t>(plan.k)) {
        throw validation_error("run_cv: malformed fold plan");
    }
    std::map<std::string, const Session*> by_id;
    for (const Session& s : sessions) by_id[s.id] = &s;
    size_t planned = 0;
    for (const auto& g : plan.groups) planned += g.size();
    if (planned != sessions.size() || by_id.size() != sessions.size()) {
        throw validation_error("run_cv: fold plan does not cover the corpus");
    }

    CvResult cv;
    cv.folds.resize(plan.k);

    auto run_fold = [&](int f) {
        TrainConfig cfg = config;
        cfg.seed = derive_seed(config.seed, 1000 + static_cast<uint64_t>(f));
        const std::vector<Session> train_set = pick_sessions(by_id, plan.train_ids(f));
        const std::vector<Session> dev_set = pick_sessions(by_id, plan.dev_ids(f));
        const std::vector<Session> test_set = pick_sessions(by_id, plan.test_ids(f));
        auto [model, log] = train(train_set, dev_set, cfg);
        FoldOutcome& out = cv.folds[f];
        out.eval = evaluate(model, test_set);
        out.log = std::move(log);
        out.model = std::move(model);
    };

    if (parallel <= 1) {
        for (int f = 0; f < plan.k; ++f) run_fold(f);
    } else {
        std::vector<std::thread> workers;
        std::atomic<int> next{0};
        const int n_workers = std::min(parallel, plan.k);
        for (int w = 0; w < n_workers; ++w) {
            workers.emplace_back([&] {
                for (int f = next.fetch_add(1); f < plan.k; f = next.fetch_add(1)) {
                    run_fold(f);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    double sum = 0.0;
    for (const FoldOutcome& f : cv.folds) {
        sum += f.eval.accuracy;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) cv.pooled_confusion[r][c] += f.eval.confusion[r][c];
    }
    cv.mean_accuracy = sum / static_cast<double>(plan.k);
    return cv;
}

std::vector<AblationRow> run_ablations(const std::vector<Session>& sessions,
                                       const FoldPlan& plan, const TrainConfig& base,
                                       int parallel) {
    std::vector<AblationRow> rows;
    for (Variant v : {Variant::hrn, Variant::hrsan, Variant::hrtan, Variant::hran}) {
        TrainConfig cfg = base;
        cfg.flags = flags_for(v);
        const CvResult cv = run_cv(sessions, plan, cfg, parallel);
        AblationRow row;
        row.variant = v;
        row.mean_accuracy = cv.mean_accuracy;
        for (const FoldOutcome& f : cv.folds) row.fold_accuracies.push_back(f.eval.accuracy);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_cv_report(const std::string& path, const CvResult& cv) {
    std::ostringstream out;
    out << "fold\taccuracy\tbest_epoch\n";
    for (size_t f = 0; f < cv.folds.size(); ++f) {
        const FoldOutcome& fo = cv.folds[f];
        out << f << "\t" << fmt_double(fo.eval.accuracy) << "\t"
            << (fo.log.best_epoch ? std::to_string(*fo.log.best_epoch) : "none") << "\n";
    }
    out << "mean_accuracy\t" << fmt_double(cv.mean_accuracy) << "\n";
    out << "confusion\ttruth\tpred_high\tpred_low\n";
    out << "confusion\thigh\t" << cv.pooled_confusion[0][0] << "\t"
        << cv.pooled_confusion[0][1] << "\n";
    out << "confusion\tlow\t" << cv.pooled_confusion[1][0] << "\t"
        << cv.pooled_confusion[1][1] << "\n";
    write_file_atomic(path, out.str());
}

void write_predictions(const std::string& path,
                       const std::vector<PredictionRow>& rows) {
    std::ostringstream out;
    out << "id\ttruth\tpredicted\tp_high\tp_low\n";
    for (const PredictionRow& r : rows) {
        out << r.id << "\t" << label_name(r.truth) << "\t" << label_name(r.predicted)
            << "\t" << fmt_double(r.p[0]) << "\t" << fmt_double(r.p[1]) << "\n";
    }
    write_file_atomic(path, out.str());
}

void write_eval_report(const std::string& path, const EvalResult& result) {
    std::ostringstream out;
    out << "accuracy\t" << fmt_double(result.accuracy) << "\n";
    out << "confusion\ttruth\tpred_high\tpred_low\n";
    out << "confusion\thigh\t" << result.confusion[0][0] << "\t" << result.confusion[0][1]
        << "\n";
    out << "confusion\tlow\t" << result.confusion[1][0] << "\t" << result.confusion[1][1]
        << "\n";
    write_file_atomic(path, out.str());
}

void write_ablation_report(const std::string& path,
                           const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    out << "variant\tmean_accuracy\tfold_accuracies\n";
    for (const AblationRow& r : rows) {
        out << variant_name(r.variant) << "\t" << fmt_double(r.mean_accuracy) << "\t";
        for (size_t f = 0; f < r.fold_accuracies.size(); ++f) {
            if (f) out << ",";
            out << fmt_double(r.fold_accuracies[f]);
        }
        out << "\n";
    }
    write_file_atomic(path, out.str());
}

}  // namespace hran
