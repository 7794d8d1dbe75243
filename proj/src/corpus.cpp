#include "hran/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hran/errors.hpp"

namespace hran {

using json = nlohmann::ordered_json;

const char* speaker_tag(Speaker s) { return s == Speaker::therapist ? "T" : "C"; }
const char* label_name(Label l) { return l == Label::high ? "high" : "low"; }

size_t Session::feature_dim() const {
    if (turns.empty() || turns.front().sub_turns.empty()) return 0;
    return turns.front().sub_turns.front().features.size();
}

void validate_session(const Session& s, size_t expected_dim) {
    if (s.id.empty()) throw validation_error("session with empty id");
    if (s.turns.empty()) throw validation_error("session '" + s.id + "': no turns");
    size_t dim = expected_dim;
    for (size_t t = 0; t < s.turns.size(); ++t) {
        const Turn& turn = s.turns[t];
        if (turn.sub_turns.empty()) {
            throw validation_error("session '" + s.id + "', turn " + std::to_string(t) +
                                   ": empty turn");
        }
        for (const SubTurn& st : turn.sub_turns) {
            if (dim == 0) dim = st.features.size();
            if (st.features.size() != dim) {
                throw validation_error("session '" + s.id + "', turn " + std::to_string(t) +
                                       ": feature dimension " +
                                       std::to_string(st.features.size()) + " != " +
                                       std::to_string(dim));
            }
            for (double v : st.features) {
                if (!std::isfinite(v)) {
                    throw validation_error("session '" + s.id + "', turn " +
                                           std::to_string(t) + ": non-finite feature");
                }
            }
            if (st.duration_sec && *st.duration_sec < 0.0) {
                throw validation_error("session '" + s.id + "', turn " + std::to_string(t) +
                                       ": negative duration");
            }
        }
    }
}

NormalizationStats compute_norm_stats(const Session& session) {
    const size_t dim = session.feature_dim();
    NormalizationStats stats;
    for (int sp = 0; sp < 2; ++sp) {
        const auto speaker = static_cast<Speaker>(sp);
        Vec mean(dim, 0.0);
        size_t count = 0;
        for (const Turn& turn : session.turns) {
            if (turn.speaker != speaker) continue;
            for (const SubTurn& st : turn.sub_turns) {
                for (size_t d = 0; d < dim; ++d) mean[d] += st.features[d];
                ++count;
            }
        }
        if (count == 0) continue;
        for (double& m : mean) m /= static_cast<double>(count);
        Vec var(dim, 0.0);
        for (const Turn& turn : session.turns) {
            if (turn.speaker != speaker) continue;
            for (const SubTurn& st : turn.sub_turns) {
                for (size_t d = 0; d < dim; ++d) {
                    const double diff = st.features[d] - mean[d];
                    var[d] += diff * diff;
                }
            }
        }
        Vec stddev(dim, 0.0);
        for (size_t d = 0; d < dim; ++d) {
            // population std with the epsilon floor for constant features
            stddev[d] = std::max(std::sqrt(var[d] / static_cast<double>(count)), kStdFloor);
        }
        stats.per_speaker[sp] = SpeakerStats{std::move(mean), std::move(stddev), count};
    }
    return stats;
}

Session normalize_session(const Session& session, const NormalizationStats& stats) {
    Session out = session;
    for (Turn& turn : out.turns) {
        const auto& sp = stats.for_speaker(turn.speaker);
        if (!sp) {
            throw validation_error("session '" + session.id + "': no stats for speaker " +
                                   speaker_tag(turn.speaker));
        }
        if (sp->mean.size() != session.feature_dim()) {
            throw validation_error("session '" + session.id +
                                   "': stats dimension mismatch");
        }
        for (SubTurn& st : turn.sub_turns) {
            for (size_t d = 0; d < st.features.size(); ++d) {
                st.features[d] = (st.features[d] - sp->mean[d]) / sp->stddev[d];
            }
        }
    }
    return out;
}

Session normalized_copy(const Session& session) {
    return normalize_session(session, compute_norm_stats(session));
}

namespace {

Session parse_session(const json& rec, size_t feature_dim, size_t line_no) {
    const std::string where = "line " + std::to_string(line_no);
    if (!rec.is_object()) throw validation_error(where + ": record is not an object");
    Session s;
    if (!rec.contains("id") || !rec["id"].is_string()) {
        throw validation_error(where + ": missing session id");
    }
    s.id = rec["id"].get<std::string>();
    if (rec.contains("label") && !rec["label"].is_null()) {
        const std::string lab = rec["label"].get<std::string>();
        if (lab == "high") {
            s.label = Label::high;
        } else if (lab == "low") {
            s.label = Label::low;
        } else {
            throw validation_error("session '" + s.id + "': unknown label '" + lab + "'");
        }
    }
    if (rec.contains("tes_score") && !rec["tes_score"].is_null()) {
        s.tes_score = rec["tes_score"].get<double>();
    }
    if (!rec.contains("turns") || !rec["turns"].is_array()) {
        throw validation_error("session '" + s.id + "': missing turns array");
    }
    size_t turn_idx = 0;
    for (const json& jt : rec["turns"]) {
        Turn turn;
        const std::string tag = jt.at("speaker").get<std::string>();
        if (tag == "T") {
            turn.speaker = Speaker::therapist;
        } else if (tag == "C") {
            turn.speaker = Speaker::client;
        } else {
            throw validation_error("session '" + s.id + "', turn " +
                                   std::to_string(turn_idx) + ": unknown speaker '" + tag +
                                   "'");
        }
        if (!jt.contains("sub_turns") || !jt["sub_turns"].is_array()) {
            throw validation_error("session '" + s.id + "', turn " +
                                   std::to_string(turn_idx) + ": missing sub_turns");
        }
        for (const json& jst : jt["sub_turns"]) {
            SubTurn st;
            st.features = jst.get<Vec>();
            turn.sub_turns.push_back(std::move(st));
        }
        s.turns.push_back(std::move(turn));
        ++turn_idx;
    }
    validate_session(s, feature_dim);
    return s;
}

}  // namespace

std::vector<Session> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open corpus file: " + path);

    std::string line;
    size_t line_no = 0;
    size_t feature_dim = 0;
    bool have_header = false;
    std::vector<Session> sessions;
    std::set<std::string> seen_ids;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw validation_error("line " + std::to_string(line_no) +
                                   ": malformed record: " + e.what());
        }
        try {
            if (!have_header) {
                if (!rec.is_object() || !rec.contains("format_version") ||
                    !rec.contains("feature_dim")) {
                    throw validation_error("line 1: missing corpus header");
                }
                if (rec["format_version"].get<int>() != 1) {
                    throw validation_error("unsupported corpus format_version");
                }
                feature_dim = rec["feature_dim"].get<size_t>();
                if (feature_dim == 0) throw validation_error("feature_dim must be positive");
                have_header = true;
                continue;
            }
            Session s = parse_session(rec, feature_dim, line_no);
            if (!seen_ids.insert(s.id).second) {
                throw validation_error("duplicate session id '" + s.id + "'");
            }
            sessions.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw validation_error("line " + std::to_string(line_no) +
                                   ": malformed record: " + e.what());
        }
    }
    if (!have_header) throw validation_error("empty corpus file: " + path);
    return sessions;
}

namespace {

json session_to_json(const Session& s) {
    json rec;
    rec["id"] = s.id;
    rec["label"] = s.label ? json(label_name(*s.label)) : json(nullptr);
    rec["tes_score"] = s.tes_score ? json(*s.tes_score) : json(nullptr);
    json turns = json::array();
    for (const Turn& turn : s.turns) {
        json jt;
        jt["speaker"] = speaker_tag(turn.speaker);
        json subs = json::array();
        for (const SubTurn& st : turn.sub_turns) subs.push_back(st.features);
        jt["sub_turns"] = std::move(subs);
        turns.push_back(std::move(jt));
    }
    rec["turns"] = std::move(turns);
    return rec;
}

}  // namespace

void save_corpus(const std::string& path, const std::vector<Session>& sessions,
                 size_t feature_dim) {
    std::ostringstream out;
    json header;
    header["format_version"] = 1;
    header["feature_dim"] = feature_dim;
    out << header.dump() << "\n";
    for (const Session& s : sessions) {
        validate_session(s, feature_dim);
        out << session_to_json(s).dump() << "\n";
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw io_error("cannot write corpus file: " + path);
        f << out.str();
        if (!f) throw io_error("write failed: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw io_error("cannot rename into place: " + path);
    }
}

std::vector<Session> filter_turns(const std::vector<Session>& sessions, SpeakerFilter f) {
    if (f == SpeakerFilter::both) return sessions;
    const Speaker keep = f == SpeakerFilter::therapist ? Speaker::therapist : Speaker::client;
    std::vector<Session> out;
    out.reserve(sessions.size());
    for (const Session& s : sessions) {
        Session copy;
        copy.id = s.id;
        copy.label = s.label;
        copy.tes_score = s.tes_score;
        for (const Turn& t : s.turns) {
            if (t.speaker == keep) copy.turns.push_back(t);
        }
        if (copy.turns.empty()) {
            throw validation_error("session '" + s.id + "': no turns left after speaker filter");
        }
        out.push_back(std::move(copy));
    }
    return out;
}

}  // namespace hran
