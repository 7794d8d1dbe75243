#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hran/corpus.hpp"

namespace hran {

enum class Placement { uniform, contiguous_runs };

// Knobs for the planted-signal generator. The defaults mirror the target
// corpus scale: 118 sessions, 61 high / 57 low, ~277 turns per session of
// 2-3 sub-turns over 88 features. Signal turns get a class-dependent mean
// shift (+strength for high, -strength for low) on the first ceil(D/4)
// feature dimensions; everything else is zero-mean Gaussian noise.
struct SynthConfig {
    int n_sessions = 118;
    double balance = 61.0 / 118.0;  // fraction of sessions labeled high
    int turns_min = 260;
    int turns_max = 294;
    int sub_turns_min = 2;
    int sub_turns_max = 3;
    int feature_dim = 88;
    double signal_strength = 3.0;
    double signal_turn_fraction = 0.2;  // fraction of turns carrying the shift
    Placement placement = Placement::uniform;
    int run_len_min = 2;  // contiguous_runs only
    int run_len_max = 6;
    double noise_std = 1.0;
    uint64_t seed = 1;
};

void validate_config(const SynthConfig& cfg);

struct SynthCorpus {
    std::vector<Session> sessions;
    // session id -> sorted 1-based indices of the turns carrying the signal
    std::map<std::string, std::vector<int>> ground_truth;
};

// Deterministic: the seed fixes the whole corpus. Sessions draw from
// per-session seeds, so generation order has no cross-talk.
SynthCorpus generate(const SynthConfig& cfg);

void save_ground_truth(const std::string& path,
                       const std::map<std::string, std::vector<int>>& truth);
std::map<std::string, std::vector<int>> load_ground_truth(const std::string& path);

}  // namespace hran
