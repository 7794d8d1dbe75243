#include "hran/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "hran/errors.hpp"
#include "hran/rng.hpp"
#include "hran/textio.hpp"

namespace hran {

void validate_config(const SynthConfig& cfg) {
    if (cfg.n_sessions < 1) throw validation_error("synth: need at least one session");
    if (!(cfg.balance >= 0.0 && cfg.balance <= 1.0)) {
        throw validation_error("synth: balance must lie in [0,1]");
    }
    if (cfg.turns_min < 1 || cfg.turns_max < cfg.turns_min) {
        throw validation_error("synth: bad turns-per-session range");
    }
    if (cfg.sub_turns_min < 1 || cfg.sub_turns_max < cfg.sub_turns_min) {
        throw validation_error("synth: bad sub-turns-per-turn range");
    }
    if (cfg.feature_dim < 1) throw validation_error("synth: feature dim must be >= 1");
    if (!(cfg.signal_strength >= 0.0)) {
        throw validation_error("synth: signal strength must be >= 0");
    }
    if (!(cfg.signal_turn_fraction > 0.0 && cfg.signal_turn_fraction <= 1.0)) {
        throw validation_error("synth: signal turn fraction must lie in (0,1]");
    }
    if (cfg.run_len_min < 1 || cfg.run_len_max < cfg.run_len_min) {
        throw validation_error("synth: bad run length range");
    }
    if (!(cfg.noise_std >= 0.0)) throw validation_error("synth: noise std must be >= 0");
}

namespace {

std::vector<int> pick_uniform(Rng& rng, int m, int n_signal) {
    std::vector<int> idx(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) idx[static_cast<size_t>(i)] = i + 1;
    for (int j = 0; j < n_signal; ++j) {
        const size_t pick = static_cast<size_t>(j) +
                            rng.index(static_cast<size_t>(m - j));
        std::swap(idx[static_cast<size_t>(j)], idx[pick]);
    }
    idx.resize(static_cast<size_t>(n_signal));
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Non-adjacent runs (gap >= 1) so the planted runs stay maximal: run
// statistics computed on the ground truth reproduce the planted lengths.
std::vector<int> pick_runs(Rng& rng, int m, int n_signal, int len_min, int len_max) {
    std::vector<int> lens;
    int placed = 0;
    while (placed < n_signal) {
        int len = rng.range(len_min, len_max);
        if (placed + len > n_signal) len = n_signal - placed;
        lens.push_back(len);
        placed += len;
    }
    const int r = static_cast<int>(lens.size());
    const int extra = m - n_signal - (r - 1);
    if (extra < 0) {
        throw validation_error(
            "synth: signal fraction too high for contiguous-run placement");
    }
    std::vector<int> slack(static_cast<size_t>(r) + 1, 0);
    for (int i = 0; i < extra; ++i) slack[rng.index(slack.size())] += 1;

    std::vector<int> out;
    int pos = 1 + slack[0];
    for (int j = 0; j < r; ++j) {
        for (int t = 0; t < lens[static_cast<size_t>(j)]; ++t) out.push_back(pos + t);
        pos += lens[static_cast<size_t>(j)];
        if (j + 1 < r) pos += 1 + slack[static_cast<size_t>(j) + 1];
    }
    return out;
}

}  // namespace

SynthCorpus generate(const SynthConfig& cfg) {
    validate_config(cfg);
    const int n_high = static_cast<int>(std::llround(cfg.balance * cfg.n_sessions));
    const int sig_dims = (cfg.feature_dim + 3) / 4;  // ceil(D/4)

    SynthCorpus corpus;
    for (int i = 0; i < cfg.n_sessions; ++i) {
        Rng rng(derive_seed(cfg.seed, 100 + static_cast<uint64_t>(i)));
        const Label label = i < n_high ? Label::high : Label::low;

        char buf[32];
        std::snprintf(buf, sizeof(buf), "synth-%04d", i + 1);

        Session s;
        s.id = buf;
        s.label = label;
        s.tes_score = label == Label::high ? rng.uniform(43.0, 63.0)
                                           : rng.uniform(9.0, 42.0);

        const int m = rng.range(cfg.turns_min, cfg.turns_max);
        int n_signal = static_cast<int>(
            std::llround(cfg.signal_turn_fraction * static_cast<double>(m)));
        n_signal = std::clamp(n_signal, 1, m);

        std::vector<int> signal =
            cfg.placement == Placement::uniform
                ? pick_uniform(rng, m, n_signal)
                : pick_runs(rng, m, n_signal, cfg.run_len_min, cfg.run_len_max);
        std::vector<char> is_signal(static_cast<size_t>(m) + 1, 0);
        for (int idx : signal) is_signal[static_cast<size_t>(idx)] = 1;

        const double shift =
            label == Label::high ? cfg.signal_strength : -cfg.signal_strength;
        for (int t = 0; t < m; ++t) {
            Turn turn;
            turn.speaker = t % 2 == 0 ? Speaker::therapist : Speaker::client;
            const int n_sub = rng.range(cfg.sub_turns_min, cfg.sub_turns_max);
            for (int u = 0; u < n_sub; ++u) {
                SubTurn sub;
                sub.features.resize(static_cast<size_t>(cfg.feature_dim));
                for (double& f : sub.features) f = cfg.noise_std * rng.normal();
                if (is_signal[static_cast<size_t>(t) + 1]) {
                    for (int d = 0; d < sig_dims; ++d) {
                        sub.features[static_cast<size_t>(d)] += shift;
                    }
                }
                turn.sub_turns.push_back(std::move(sub));
            }
            s.turns.push_back(std::move(turn));
        }

        corpus.ground_truth[s.id] = std::move(signal);
        corpus.sessions.push_back(std::move(s));
    }
    return corpus;
}

void save_ground_truth(const std::string& path,
                       const std::map<std::string, std::vector<int>>& truth) {
    nlohmann::ordered_json doc;
    doc["format_version"] = 1;
    nlohmann::ordered_json sessions = nlohmann::ordered_json::object();
    for (const auto& [id, indices] : truth) sessions[id] = indices;
    doc["sessions"] = std::move(sessions);
    write_file_atomic(path, doc.dump(2) + "\n");
}

std::map<std::string, std::vector<int>> load_ground_truth(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("ground truth file: " + std::string(e.what()));
    }
    if (!doc.is_object() || doc.value("format_version", 0) != 1 ||
        !doc.contains("sessions") || !doc["sessions"].is_object()) {
        throw validation_error("ground truth file: unrecognized layout");
    }
    std::map<std::string, std::vector<int>> truth;
    for (const auto& [id, value] : doc["sessions"].items()) {
        if (!value.is_array()) {
            throw validation_error("ground truth for '" + id + "' is not a list");
        }
        std::vector<int> indices;
        for (const auto& v : value) {
            if (!v.is_number_integer() || v.get<int>() < 1) {
                throw validation_error("ground truth for '" + id +
                                       "' has a non-positive index");
            }
            indices.push_back(v.get<int>());
        }
        std::sort(indices.begin(), indices.end());
        truth[id] = std::move(indices);
    }
    return truth;
}

}  // namespace hran
