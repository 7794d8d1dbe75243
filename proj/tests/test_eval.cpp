#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hran/corpus.hpp"
#include "hran/errors.hpp"
#include "hran/eval.hpp"
#include "hran/rng.hpp"
#include "test_util.hpp"

using namespace hran;

namespace {

std::vector<Session> labeled_corpus(uint64_t seed, int n_high, int n_low,
                                    size_t dim = 4, int turns = 3) {
    Rng rng(seed);
    std::vector<Session> out;
    for (int i = 0; i < n_high + n_low; ++i) {
        const Label lab = i < n_high ? Label::high : Label::low;
        out.push_back(testutil::random_session(rng, dim, turns, 1, 2, lab,
                                               "s-" + std::to_string(i)));
    }
    return out;
}

std::map<std::string, Label> label_index(const std::vector<Session>& sessions) {
    std::map<std::string, Label> out;
    for (const Session& s : sessions) out[s.id] = *s.label;
    return out;
}

void check_plan_properties(const FoldPlan& plan, const std::vector<Session>& sessions) {
    const auto labels = label_index(sessions);
    const int k = plan.k;
    REQUIRE(static_cast<int>(plan.groups.size()) == k);

    // disjoint and exhaustive
    std::set<std::string> seen;
    size_t total = 0;
    for (const auto& group : plan.groups) {
        for (const std::string& id : group) {
            CHECK(labels.count(id) == 1);
            CHECK(seen.insert(id).second);
            ++total;
        }
    }
    CHECK(total == sessions.size());

    // group sizes differ by at most one
    size_t min_sz = sessions.size(), max_sz = 0;
    for (const auto& group : plan.groups) {
        min_sz = std::min(min_sz, group.size());
        max_sz = std::max(max_sz, group.size());
    }
    CHECK(max_sz - min_sz <= 1);

    // per-class counts differ by at most one across groups
    for (Label lab : {Label::high, Label::low}) {
        size_t lo = sessions.size(), hi = 0;
        for (const auto& group : plan.groups) {
            size_t c = 0;
            for (const std::string& id : group) {
                if (labels.at(id) == lab) ++c;
            }
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        CHECK(hi - lo <= 1);
    }

    // fold roles: test = group f, dev = group f+1 mod k, train = the rest
    for (int f = 0; f < k; ++f) {
        CHECK(&plan.test_ids(f) == &plan.groups[static_cast<size_t>(f)]);
        CHECK(&plan.dev_ids(f) == &plan.groups[static_cast<size_t>((f + 1) % k)]);
        const auto train = plan.train_ids(f);
        std::set<std::string> excluded(plan.test_ids(f).begin(), plan.test_ids(f).end());
        excluded.insert(plan.dev_ids(f).begin(), plan.dev_ids(f).end());
        CHECK(train.size() + excluded.size() == sessions.size());
        for (const std::string& id : train) CHECK(excluded.count(id) == 0);
    }
}

}  // namespace

TEST_CASE("variant flags and names") {
    CHECK(flags_for(Variant::hrn).use_sub_attention == false);
    CHECK(flags_for(Variant::hrn).use_turn_attention == false);
    CHECK(flags_for(Variant::hrsan).use_sub_attention == true);
    CHECK(flags_for(Variant::hrsan).use_turn_attention == false);
    CHECK(flags_for(Variant::hrtan).use_sub_attention == false);
    CHECK(flags_for(Variant::hrtan).use_turn_attention == true);
    CHECK(flags_for(Variant::hran).use_sub_attention == true);
    CHECK(flags_for(Variant::hran).use_turn_attention == true);

    for (Variant v : {Variant::hrn, Variant::hrsan, Variant::hrtan, Variant::hran}) {
        CHECK(variant_from_name(variant_name(v)) == v);
    }
    CHECK_THROWS_AS(variant_from_name("mlp"), validation_error);
}

TEST_CASE("six sessions in six folds form singletons") {
    const auto sessions = labeled_corpus(1, 3, 3);
    const FoldPlan plan = make_folds(sessions, 6, 7);
    check_plan_properties(plan, sessions);
    for (const auto& group : plan.groups) CHECK(group.size() == 1);
}

TEST_CASE("the full-corpus-scale split balances sizes and labels") {
    const auto sessions = labeled_corpus(2, 61, 57, 3, 2);
    const FoldPlan plan = make_folds(sessions, 6, 11);
    check_plan_properties(plan, sessions);

    std::multiset<size_t> sizes;
    for (const auto& group : plan.groups) sizes.insert(group.size());
    CHECK(sizes == std::multiset<size_t>{19, 19, 20, 20, 20, 20});
    for (int f = 0; f < 6; ++f) {
        CHECK(plan.test_ids(f).size() <= 20);
        CHECK(plan.dev_ids(f).size() <= 20);
    }
}

TEST_CASE("fold plans satisfy their invariants over random shapes") {
    Rng rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 12 + static_cast<int>(rng.index(189));  // 12..200
        const int n_high = 1 + static_cast<int>(rng.index(static_cast<uint64_t>(n - 1)));
        const int k = 3 + static_cast<int>(rng.index(6));  // 3..8
        if (n < k) continue;
        const auto sessions = labeled_corpus(100 + trial, n_high, n - n_high, 3, 2);
        const FoldPlan plan = make_folds(sessions, k, rng.bits());
        check_plan_properties(plan, sessions);
    }
}

TEST_CASE("fold seeds reshuffle the assignment but keep the invariants") {
    const auto sessions = labeled_corpus(4, 10, 10);
    const FoldPlan a = make_folds(sessions, 4, 1);
    const FoldPlan b = make_folds(sessions, 4, 2);
    const FoldPlan a2 = make_folds(sessions, 4, 1);
    CHECK(a.groups == a2.groups);
    CHECK(a.groups != b.groups);
}

TEST_CASE("make_folds rejects degenerate requests") {
    const auto sessions = labeled_corpus(5, 4, 4);
    CHECK_THROWS_AS(make_folds(sessions, 2, 1), validation_error);
    CHECK_THROWS_AS(make_folds(sessions, 9, 1), validation_error);

    auto one_class = labeled_corpus(6, 5, 0);
    CHECK_THROWS_AS(make_folds(one_class, 3, 1), validation_error);

    auto unlabeled = sessions;
    unlabeled[3].label.reset();
    CHECK_THROWS_AS(make_folds(unlabeled, 3, 1), validation_error);
}

TEST_CASE("evaluate scores a constant-High model exactly") {
    const auto sessions = labeled_corpus(7, 6, 4);
    // zero weights everywhere, but a large High logit bias
    ModelParams model = make_params(ModelDims{4, 2, 2}, ModelFlags{});
    model.b_out[0] = 5.0;

    const EvalResult res = evaluate(model, sessions);
    CHECK(res.accuracy == doctest::Approx(0.6));
    CHECK(res.confusion[0][0] == 6);  // high predicted high
    CHECK(res.confusion[0][1] == 0);
    CHECK(res.confusion[1][0] == 4);  // low predicted high
    CHECK(res.confusion[1][1] == 0);
    REQUIRE(res.predictions.size() == sessions.size());
    for (size_t i = 0; i < sessions.size(); ++i) {
        CHECK(res.predictions[i].id == sessions[i].id);
        CHECK(res.predictions[i].predicted == Label::high);
        CHECK(res.predictions[i].p[0] > res.predictions[i].p[1]);
        CHECK(res.predictions[i].p[0] + res.predictions[i].p[1] ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("evaluate reaches accuracy one when the labels equal the predictions") {
    auto sessions = labeled_corpus(8, 5, 5);
    const ModelParams model = init_params(ModelDims{4, 3, 2}, ModelFlags{}, 77);

    // relabel every session with the model's own prediction
    for (Session& s : sessions) {
        s.label = predict(forward(normalized_copy(s), model));
    }
    const EvalResult res = evaluate(model, sessions);
    CHECK(res.accuracy == 1.0);
    CHECK(res.confusion[0][1] == 0);
    CHECK(res.confusion[1][0] == 0);
    CHECK(res.confusion[0][0] + res.confusion[1][1] ==
          static_cast<long>(sessions.size()));
}

TEST_CASE("evaluate rejects unlabeled sessions") {
    auto sessions = labeled_corpus(9, 2, 2);
    sessions[1].label.reset();
    const ModelParams model = make_params(ModelDims{4, 2, 2}, ModelFlags{});
    CHECK_THROWS_AS(evaluate(model, sessions), validation_error);
}

TEST_CASE("cross validation covers the corpus and aggregates folds") {
    const auto sessions = labeled_corpus(10, 6, 6, 4, 3);
    const FoldPlan plan = make_folds(sessions, 4, 3);

    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.lr0 = 1e-3;
    cfg.seed = 5;
    cfg.dims = ModelDims{0, 3, 2};

    const CvResult cv = run_cv(sessions, plan, cfg);
    REQUIRE(cv.folds.size() == 4);

    long pooled_total = 0;
    double lo = 1.0, hi = 0.0, sum = 0.0;
    size_t pooled_rows = 0;
    for (const FoldOutcome& fold : cv.folds) {
        lo = std::min(lo, fold.eval.accuracy);
        hi = std::max(hi, fold.eval.accuracy);
        sum += fold.eval.accuracy;
        pooled_rows += fold.eval.predictions.size();
    }
    for (int t = 0; t < 2; ++t) {
        for (int p = 0; p < 2; ++p) pooled_total += cv.pooled_confusion[t][p];
    }
    CHECK(pooled_total == static_cast<long>(sessions.size()));
    CHECK(pooled_rows == sessions.size());
    CHECK(cv.mean_accuracy == doctest::Approx(sum / 4.0));
    CHECK(cv.mean_accuracy >= lo);
    CHECK(cv.mean_accuracy <= hi);

    // each fold's test rows are exactly the plan's test ids
    for (int f = 0; f < 4; ++f) {
        std::set<std::string> expect(plan.test_ids(f).begin(), plan.test_ids(f).end());
        std::set<std::string> got;
        for (const PredictionRow& row : cv.folds[static_cast<size_t>(f)].eval.predictions) {
            got.insert(row.id);
        }
        CHECK(got == expect);
    }
}

TEST_CASE("cross validation is deterministic and independent of parallelism") {
    const auto sessions = labeled_corpus(11, 5, 5, 4, 2);
    const FoldPlan plan = make_folds(sessions, 3, 9);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.lr0 = 1e-3;
    cfg.seed = 13;
    cfg.dims = ModelDims{0, 3, 2};

    const CvResult serial = run_cv(sessions, plan, cfg, 1);
    const CvResult threaded = run_cv(sessions, plan, cfg, 3);
    const CvResult repeat = run_cv(sessions, plan, cfg, 1);

    REQUIRE(serial.folds.size() == threaded.folds.size());
    CHECK(serial.mean_accuracy == threaded.mean_accuracy);
    CHECK(serial.mean_accuracy == repeat.mean_accuracy);
    for (size_t f = 0; f < serial.folds.size(); ++f) {
        CHECK(serial.folds[f].eval.accuracy == threaded.folds[f].eval.accuracy);
        REQUIRE(serial.folds[f].eval.predictions.size() ==
                threaded.folds[f].eval.predictions.size());
        for (size_t i = 0; i < serial.folds[f].eval.predictions.size(); ++i) {
            CHECK(serial.folds[f].eval.predictions[i].p[0] ==
                  threaded.folds[f].eval.predictions[i].p[0]);
        }
        CHECK(serial.folds[f].log.best_epoch == threaded.folds[f].log.best_epoch);
    }
}

TEST_CASE("run_cv rejects a plan that does not match the corpus") {
    const auto sessions = labeled_corpus(12, 4, 4);
    const FoldPlan plan = make_folds(sessions, 4, 1);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.dims = ModelDims{0, 2, 2};

    auto smaller = sessions;
    smaller.pop_back();
    CHECK_THROWS_AS(run_cv(smaller, plan, cfg), validation_error);

    FoldPlan renamed = plan;
    renamed.groups[0][0] = "no-such-session";
    CHECK_THROWS_AS(run_cv(sessions, renamed, cfg), validation_error);
}

TEST_CASE("ablations run all four variants over the same plan") {
    const auto sessions = labeled_corpus(13, 4, 4, 3, 2);
    const FoldPlan plan = make_folds(sessions, 3, 2);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.lr0 = 1e-3;
    cfg.seed = 21;
    cfg.dims = ModelDims{0, 2, 2};

    const auto rows = run_ablations(sessions, plan, cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].variant == Variant::hrn);
    CHECK(rows[1].variant == Variant::hrsan);
    CHECK(rows[2].variant == Variant::hrtan);
    CHECK(rows[3].variant == Variant::hran);
    for (const AblationRow& row : rows) {
        REQUIRE(row.fold_accuracies.size() == 3);
        double sum = 0.0;
        for (double a : row.fold_accuracies) {
            CHECK(a >= 0.0);
            CHECK(a <= 1.0);
            sum += a;
        }
        CHECK(row.mean_accuracy == doctest::Approx(sum / 3.0));
    }

    // the full-variant run matches a direct run_cv with the same flags
    TrainConfig full = cfg;
    full.flags = flags_for(Variant::hran);
    const CvResult direct = run_cv(sessions, plan, full);
    CHECK(rows[3].mean_accuracy == direct.mean_accuracy);
}

TEST_CASE("report writers emit the documented tab-separated layouts") {
    const auto sessions = labeled_corpus(14, 3, 3, 3, 2);
    const FoldPlan plan = make_folds(sessions, 3, 4);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.lr0 = 1e-3;
    cfg.dims = ModelDims{0, 2, 2};
    const CvResult cv = run_cv(sessions, plan, cfg);

    const std::string dir = testutil::scratch_dir("eval_reports");

    write_cv_report(dir + "/cv.tsv", cv);
    const std::string cv_text = testutil::slurp(dir + "/cv.tsv");
    CHECK(cv_text.rfind("fold\taccuracy\tbest_epoch\n", 0) == 0);
    CHECK(cv_text.find("mean_accuracy\t") != std::string::npos);
    CHECK(cv_text.find("confusion\ttruth\tpred_high\tpred_low\n") != std::string::npos);
    CHECK(cv_text.find("confusion\thigh\t") != std::string::npos);
    CHECK(cv_text.find("confusion\tlow\t") != std::string::npos);

    std::vector<PredictionRow> rows;
    rows.push_back({"x1", Label::high, Label::low, {0.25, 0.75}});
    write_predictions(dir + "/pred.tsv", rows);
    CHECK(testutil::slurp(dir + "/pred.tsv") ==
          "id\ttruth\tpredicted\tp_high\tp_low\nx1\thigh\tlow\t0.25\t0.75\n");

    write_eval_report(dir + "/eval.tsv", cv.folds[0].eval);
    const std::string ev = testutil::slurp(dir + "/eval.tsv");
    CHECK(ev.rfind("accuracy\t", 0) == 0);
    CHECK(ev.find("confusion\ttruth\tpred_high\tpred_low\n") != std::string::npos);

    AblationRow row;
    row.variant = Variant::hrsan;
    row.mean_accuracy = 0.5;
    row.fold_accuracies = {0.25, 0.75};
    write_ablation_report(dir + "/abl.tsv", {row});
    CHECK(testutil::slurp(dir + "/abl.tsv") ==
          "variant\tmean_accuracy\tfold_accuracies\nhrsan\t0.5\t0.25,0.75\n");
}
