#include "hran/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hran/errors.hpp"
#include "hran/textio.hpp"

namespace hran {

std::vector<int> important_turns(const Vec& weights, double percentile) {
    if (weights.empty()) throw validation_error("important_turns: empty weights");
    if (!(percentile > 0.0 && percentile < 100.0)) {
        throw validation_error("important_turns: percentile must lie in (0,100)");
    }
    Vec sorted = weights;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    size_t rank = static_cast<size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    const double threshold = sorted[rank - 1];

    std::vector<int> out;
    for (size_t i = 0; i < n; ++i) {
        if (weights[i] > threshold) out.push_back(static_cast<int>(i) + 1);
    }
    return out;
}

RunStats consecutive_runs(const std::vector<int>& important) {
    RunStats st;
    if (important.empty()) return st;
    int run = 1;
    for (size_t i = 1; i < important.size(); ++i) {
        if (important[i] <= important[i - 1]) {
            throw validation_error("consecutive_runs: indices must be strictly increasing");
        }
        if (important[i] == important[i - 1] + 1) {
            ++run;
        } else {
            st.lengths.push_back(run);
            run = 1;
        }
    }
    st.lengths.push_back(run);
    long total = 0;
    for (int l : st.lengths) total += l;
    st.mean_length = static_cast<double>(total) / static_cast<double>(st.lengths.size());
    return st;
}

Vec section_distribution(const std::vector<int>& important, int m, int n_sections) {
    if (m < 1) throw validation_error("section_distribution: turn count must be >= 1");
    if (n_sections < 1 || n_sections > m) {
        throw validation_error("section_distribution: need 1 <= n_sections <= turn count");
    }
    // Section s (0-based) holds base+1 turns if s < rem, else base turns.
    const int base = m / n_sections;
    const int rem = m % n_sections;
    auto section_of = [&](int idx) {  // idx is 1-based
        const int zero = idx - 1;
        const int cut = rem * (base + 1);
        if (zero < cut) return zero / (base + 1);
        return rem + (zero - cut) / base;
    };

    Vec ratios(static_cast<size_t>(n_sections), 0.0);
    for (int idx : important) {
        if (idx < 1 || idx > m) {
            throw validation_error("section_distribution: index out of range");
        }
        ratios[static_cast<size_t>(section_of(idx))] += 1.0;
    }
    if (!important.empty()) {
        for (double& r : ratios) r /= static_cast<double>(important.size());
    }
    return ratios;
}

AttentionReport analyze_session(const ModelParams& model, const Session& session,
                                double percentile, int n_sections) {
    const ForwardTrace trace = forward(normalized_copy(session), model);
    AttentionReport rep;
    rep.id = session.id;
    rep.turn_weights = trace.turn_attention();
    rep.important = important_turns(rep.turn_weights, percentile);
    rep.runs = consecutive_runs(rep.important);
    rep.section_ratios = section_distribution(
        rep.important, static_cast<int>(session.turns.size()), n_sections);
    rep.predicted = predict(trace);
    rep.truth = session.label;
    if (session.label) rep.correct = (*session.label == rep.predicted);
    return rep;
}

AnalysisSummary aggregate_reports(const std::vector<AttentionReport>& reports) {
    if (reports.empty()) throw validation_error("aggregate_reports: no reports");
    AnalysisSummary sum;
    sum.n_sections = static_cast<int>(reports.front().section_ratios.size());
    sum.mean_ratio_correct.assign(static_cast<size_t>(sum.n_sections), 0.0);
    sum.mean_ratio_misclassified.assign(static_cast<size_t>(sum.n_sections), 0.0);

    long total_runs = 0, total_run_len = 0;
    for (const AttentionReport& rep : reports) {
        if (static_cast<int>(rep.section_ratios.size()) != sum.n_sections) {
            throw validation_error("aggregate_reports: mixed section counts");
        }
        for (int l : rep.runs.lengths) {
            sum.run_length_histogram[l] += 1;
            total_runs += 1;
            total_run_len += l;
        }
        if (!rep.correct) continue;
        Vec& acc = *rep.correct ? sum.mean_ratio_correct : sum.mean_ratio_misclassified;
        (*rep.correct ? sum.n_correct : sum.n_misclassified) += 1;
        for (size_t s = 0; s < rep.section_ratios.size(); ++s) {
            acc[s] += rep.section_ratios[s];
        }
    }
    if (sum.n_correct > 0) {
        for (double& r : sum.mean_ratio_correct) r /= static_cast<double>(sum.n_correct);
    }
    if (sum.n_misclassified > 0) {
        for (double& r : sum.mean_ratio_misclassified) {
            r /= static_cast<double>(sum.n_misclassified);
        }
    }
    if (total_runs > 0) {
        sum.mean_run_length =
            static_cast<double>(total_run_len) / static_cast<double>(total_runs);
    }
    return sum;
}

double localization_recall(const std::vector<int>& important,
                           const std::vector<int>& truth) {
    if (truth.empty()) return 0.0;
    const std::set<int> truth_set(truth.begin(), truth.end());
    size_t hits = 0;
    for (int idx : important) hits += truth_set.count(idx);
    return static_cast<double>(hits) / static_cast<double>(truth_set.size());
}

void write_attention_reports(const std::string& path,
                             const std::vector<AttentionReport>& reports) {
    std::ostringstream out;
    out << "id\tturns\tn_important\tmean_run_length\tsection_ratios\tcorrect\t"
           "important_turns\n";
    for (const AttentionReport& rep : reports) {
        out << rep.id << "\t" << rep.turn_weights.size() << "\t" << rep.important.size()
            << "\t" << fmt_double(rep.runs.mean_length) << "\t";
        for (size_t s = 0; s < rep.section_ratios.size(); ++s) {
            if (s) out << ",";
            out << fmt_double(rep.section_ratios[s]);
        }
        out << "\t";
        if (rep.correct) {
            out << (*rep.correct ? "yes" : "no");
        } else {
            out << "unlabeled";
        }
        out << "\t";
        for (size_t i = 0; i < rep.important.size(); ++i) {
            if (i) out << ",";
            out << rep.important[i];
        }
        out << "\n";
    }
    write_file_atomic(path, out.str());
}

void write_analysis_summary(const std::string& path, const AnalysisSummary& summary) {
    std::ostringstream out;
    auto ratio_row = [&](const char* group, const Vec& ratios, size_t n) {
        out << "section_ratios\t" << group << "\t" << n << "\t";
        for (size_t s = 0; s < ratios.size(); ++s) {
            if (s) out << ",";
            out << fmt_double(ratios[s]);
        }
        out << "\n";
    };
    ratio_row("correct", summary.mean_ratio_correct, summary.n_correct);
    ratio_row("misclassified", summary.mean_ratio_misclassified, summary.n_misclassified);
    out << "mean_run_length\t" << fmt_double(summary.mean_run_length) << "\n";
    out << "run_length_histogram\tlength\tcount\n";
    for (const auto& [len, count] : summary.run_length_histogram) {
        out << "run_length_histogram\t" << len << "\t" << count << "\n";
    }
    write_file_atomic(path, out.str());
}

}  // namespace hran
