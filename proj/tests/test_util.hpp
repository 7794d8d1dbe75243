#pragma once

// Shared helpers for the test binaries: random model/session builders, the
// finite-difference gradient oracle, scratch directories, and a tiny
// subprocess runner for the CLI.

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "hran/corpus.hpp"
#include "hran/nn.hpp"
#include "hran/rng.hpp"

namespace testutil {

inline hran::Session random_session(hran::Rng& rng, size_t feature_dim, int turns,
                                    int subs_min, int subs_max,
                                    std::optional<hran::Label> label = hran::Label::high,
                                    const std::string& id = "s") {
    hran::Session s;
    s.id = id;
    s.label = label;
    for (int t = 0; t < turns; ++t) {
        hran::Turn turn;
        turn.speaker = t % 2 == 0 ? hran::Speaker::therapist : hran::Speaker::client;
        const int n_sub = static_cast<int>(rng.range(subs_min, subs_max));
        for (int u = 0; u < n_sub; ++u) {
            hran::SubTurn sub;
            sub.features.resize(feature_dim);
            for (double& f : sub.features) f = rng.normal();
            turn.sub_turns.push_back(std::move(sub));
        }
        s.turns.push_back(std::move(turn));
    }
    return s;
}

// |a - n| <= max(abs_floor, rel_tol * max(|a|, |n|))
inline bool close_grad(double analytic, double numeric, double rel_tol,
                       double abs_floor) {
    const double diff = std::abs(analytic - numeric);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    return diff <= std::max(abs_floor, rel_tol * scale);
}

struct FdReport {
    bool ok = true;
    size_t checked = 0;
    double max_rel = 0.0;
    std::string worst;  // "tensor[i]: analytic vs numeric"
};

// Central-difference check of every parameter entry against backward().
inline FdReport check_gradients(const hran::Session& session, hran::ModelParams params,
                                hran::Label label, double step = 1e-5,
                                double rel_tol = 1e-4, double abs_floor = 1e-8) {
    const hran::ForwardTrace trace = hran::forward(session, params);
    const hran::Gradients grads = hran::backward(session, params, trace, label);

    std::vector<std::pair<std::string, hran::Vec*>> param_tensors;
    hran::visit_tensors(static_cast<hran::ModelTensors&>(params),
                        [&](const std::string& name, hran::Vec& v) {
                            param_tensors.emplace_back(name, &v);
                        });
    std::vector<const hran::Vec*> grad_tensors;
    hran::visit_tensors(const_cast<hran::Gradients&>(grads),
                        [&](const std::string&, hran::Vec& v) {
                            grad_tensors.push_back(&v);
                        });

    FdReport rep;
    for (size_t t = 0; t < param_tensors.size(); ++t) {
        hran::Vec& theta = *param_tensors[t].second;
        for (size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            theta[i] = saved + step;
            const double lp = hran::loss(hran::forward(session, params), label);
            theta[i] = saved - step;
            const double lm = hran::loss(hran::forward(session, params), label);
            theta[i] = saved;
            const double numeric = (lp - lm) / (2.0 * step);
            const double analytic = (*grad_tensors[t])[i];
            ++rep.checked;
            const double scale = std::max(std::abs(analytic), std::abs(numeric));
            const double rel = scale > 0.0 ? std::abs(analytic - numeric) / scale : 0.0;
            if (!close_grad(analytic, numeric, rel_tol, abs_floor)) {
                rep.ok = false;
                if (rel >= rep.max_rel) {
                    rep.worst = param_tensors[t].first + "[" + std::to_string(i) +
                                "]: " + std::to_string(analytic) + " vs " +
                                std::to_string(numeric);
                }
            }
            if (rel > rep.max_rel && std::abs(analytic - numeric) > abs_floor) {
                rep.max_rel = rel;
            }
        }
    }
    return rep;
}

// Fresh scratch directory under the system temp root.
inline std::string scratch_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("hran_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

inline CliResult run_cli([[maybe_unused]] const std::string& args) {
#ifdef HRAN_CLI_PATH
    const std::string cmd = std::string(HRAN_CLI_PATH) + " " + args + " 2>&1";
#else
    const std::string cmd = "false";
#endif
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return res;
    char buf[4096];
    size_t n = 0;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) res.output.append(buf, n);
    const int status = pclose(pipe);
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    return res;
}

inline std::string slurp(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return "<missing:" + path + ">";
    std::string out;
    char buf[4096];
    size_t n = 0;
    while ((n = fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, n);
    std::fclose(f);
    return out;
}

inline void write_text(const std::string& path, const std::string& content) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) return;
    fwrite(content.data(), 1, content.size(), f);
    std::fclose(f);
}

}  // namespace testutil
