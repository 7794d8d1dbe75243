#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hran/corpus.hpp"
#include "hran/nn.hpp"

namespace hran {

// Indices of turns whose attention weight strictly exceeds the session's
// own percentile threshold (nearest-rank: sorted[ceil(p/100*N)] with 1-based
// rank). Returned indices are 1-based and sorted ascending.
std::vector<int> important_turns(const Vec& weights, double percentile = 70.0);

struct RunStats {
    std::vector<int> lengths;  // maximal runs of consecutive indices, in order
    double mean_length = 0.0;  // 0 when there are no runs
};

// Decomposes a strictly increasing index list into maximal consecutive runs.
RunStats consecutive_runs(const std::vector<int>& important);

// Splits turns 1..m into n contiguous sections of near-equal size (earlier
// sections take the remainder) and returns the fraction of the important
// set falling in each section. All zeros when the important set is empty.
Vec section_distribution(const std::vector<int>& important, int m, int n_sections = 5);

struct AttentionReport {
    std::string id;
    Vec turn_weights;
    std::vector<int> important;  // 1-based
    RunStats runs;
    Vec section_ratios;
    std::optional<Label> truth;
    Label predicted = Label::high;
    std::optional<bool> correct;  // unset for unlabeled sessions
};

// Runs the model on one session (normalizing first) and derives the
// turn-attention statistics above.
AttentionReport analyze_session(const ModelParams& model, const Session& session,
                                double percentile = 70.0, int n_sections = 5);

struct AnalysisSummary {
    int n_sections = 5;
    size_t n_correct = 0;
    size_t n_misclassified = 0;
    Vec mean_ratio_correct;        // zero vector when n_correct == 0
    Vec mean_ratio_misclassified;  // zero vector when n_misclassified == 0
    std::map<int, long> run_length_histogram;  // pooled over all reports
    double mean_run_length = 0.0;              // over all pooled runs
};

// Mean section ratios split by classification correctness (unlabeled
// sessions are skipped there) plus a pooled run-length histogram.
AnalysisSummary aggregate_reports(const std::vector<AttentionReport>& reports);

// |important ∩ truth| / |truth|; 0 when truth is empty.
double localization_recall(const std::vector<int>& important,
                           const std::vector<int>& truth);

void write_attention_reports(const std::string& path,
                             const std::vector<AttentionReport>& reports);
void write_analysis_summary(const std::string& path, const AnalysisSummary& summary);

}  // namespace hran
