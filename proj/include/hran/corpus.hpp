#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hran/tensor.hpp"

namespace hran {

enum class Speaker { therapist = 0, client = 1 };
enum class Label { high = 0, low = 1 };

const char* speaker_tag(Speaker s);   // "T" / "C"
const char* label_name(Label l);      // "high" / "low"

struct SubTurn {
    Vec features;
    std::optional<double> duration_sec;  // metadata only, not serialized
};

struct Turn {
    Speaker speaker = Speaker::therapist;
    std::vector<SubTurn> sub_turns;
};

struct Session {
    std::string id;
    std::vector<Turn> turns;
    std::optional<Label> label;
    std::optional<double> tes_score;

    size_t feature_dim() const;  // dimension of the first sub-turn
    size_t turn_count() const { return turns.size(); }
};

// Per-speaker z-normalization statistics computed within a single session.
struct SpeakerStats {
    Vec mean;
    Vec stddev;  // floored at kStdFloor
    size_t count = 0;
};

struct NormalizationStats {
    std::array<std::optional<SpeakerStats>, 2> per_speaker;

    const std::optional<SpeakerStats>& for_speaker(Speaker s) const {
        return per_speaker[static_cast<size_t>(s)];
    }
};

inline constexpr double kStdFloor = 1e-6;

// Throws validation_error when an invariant fails; expected_dim == 0 means
// "take the dimension from the session itself".
void validate_session(const Session& s, size_t expected_dim = 0);

NormalizationStats compute_norm_stats(const Session& session);

// (x - mean) / std per speaker; structure unchanged.
Session normalize_session(const Session& session, const NormalizationStats& stats);

Session normalized_copy(const Session& session);  // stats from the session itself

// Corpus files are JSON-lines: a header record {"format_version":1,
// "feature_dim":D} followed by one session record per line.
std::vector<Session> load_corpus(const std::string& path);
void save_corpus(const std::string& path, const std::vector<Session>& sessions,
                 size_t feature_dim);

enum class SpeakerFilter { both, therapist, client };

// Keeps only the selected speaker's turns (data selection for the
// therapist-only / client-only conditions). Throws if a session loses
// all of its turns.
std::vector<Session> filter_turns(const std::vector<Session>& sessions, SpeakerFilter f);

}  // namespace hran
