#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hran/corpus.hpp"
#include "hran/nn.hpp"
#include "hran/train.hpp"

namespace hran {

// Model variants: which attention levels are enabled.
enum class Variant { hrn, hrsan, hrtan, hran };

ModelFlags flags_for(Variant v);
const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);  // throws validation_error

// Deterministic k-fold split. Sessions are shuffled with the seed
// (per label class, to stratify) and dealt round-robin into k groups of
// near-equal size. Fold f tests on group f and uses group (f+1) mod k
// for development; the remaining k-2 groups train.
struct FoldPlan {
    int k = 6;
    uint64_t seed = 0;
    std::vector<std::vector<std::string>> groups;  // session ids per group

    const std::vector<std::string>& test_ids(int fold) const { return groups.at(fold); }
    const std::vector<std::string>& dev_ids(int fold) const {
        return groups.at((fold + 1) % k);
    }
    std::vector<std::string> train_ids(int fold) const;
};

FoldPlan make_folds(const std::vector<Session>& sessions, int k, uint64_t seed);

struct PredictionRow {
    std::string id;
    Label truth;
    Label predicted;
    std::array<double, 2> p;  // [P(high), P(low)]
};

struct EvalResult {
    double accuracy = 0.0;
    // confusion[truth][predicted], truth/predicted in {high=0, low=1}
    std::array<std::array<long, 2>, 2> confusion{};
    std::vector<PredictionRow> predictions;
};

// Runs the model on labeled sessions (normalizing each per speaker first)
// and tallies accuracy and the confusion matrix. An exact probability tie
// predicts High.
EvalResult evaluate(const ModelParams& model, const std::vector<Session>& sessions);

struct FoldOutcome {
    EvalResult eval;
    TrainLog log;
    ModelParams model;  // best checkpoint of this fold
};

struct CvResult {
    double mean_accuracy = 0.0;
    std::vector<FoldOutcome> folds;
    std::array<std::array<long, 2>, 2> pooled_confusion{};
};

// Trains and tests every fold of the plan. Each fold trains with a seed
// derived from config.seed and the fold index, so results do not depend on
// `parallel` (fold count capped). The plan must cover exactly `sessions`.
CvResult run_cv(const std::vector<Session>& sessions, const FoldPlan& plan,
                const TrainConfig& config, int parallel = 1);

struct AblationRow {
    Variant variant;
    double mean_accuracy = 0.0;
    std::vector<double> fold_accuracies;
};

// run_cv once per variant, identical plan and seeds. Rows in enum order.
std::vector<AblationRow> run_ablations(const std::vector<Session>& sessions,
                                       const FoldPlan& plan, const TrainConfig& base,
                                       int parallel = 1);

void write_cv_report(const std::string& path, const CvResult& cv);
void write_predictions(const std::string& path,
                       const std::vector<PredictionRow>& rows);
void write_eval_report(const std::string& path, const EvalResult& result);
void write_ablation_report(const std::string& path,
                           const std::vector<AblationRow>& rows);

}  // namespace hran
