// hran: generate synthetic corpora, train, cross-validate, and analyze
// attention weights of the hierarchical recurrent attention network.
#include <cmath>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hran/analysis.hpp"
#include "hran/corpus.hpp"
#include "hran/errors.hpp"
#include "hran/eval.hpp"
#include "hran/nn.hpp"
#include "hran/rng.hpp"
#include "hran/synth.hpp"
#include "hran/textio.hpp"
#include "hran/train.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

// Exit codes: 0 success, 2 usage, 3 data validation, 4 I/O.
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw hran::io_error("cannot create directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// Manifests echo every reproducibility-relevant flag but no destination
// paths, so reruns into different directories stay byte-identical.
void write_manifest(const std::string& path, const std::string& command,
                    uint64_t seed, ordered_json config, ordered_json artifacts,
                    ordered_json results = ordered_json::object()) {
    ordered_json doc;
    doc["tool"] = "hran";
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["seed"] = seed;
    doc["config"] = std::move(config);
    doc["artifacts"] = std::move(artifacts);
    if (!results.empty()) doc["results"] = std::move(results);
    hran::write_file_atomic(path, doc.dump(2) + "\n");
}

hran::SpeakerFilter speaker_filter(const std::string& name) {
    if (name == "both") return hran::SpeakerFilter::both;
    if (name == "therapist") return hran::SpeakerFilter::therapist;
    return hran::SpeakerFilter::client;
}

std::vector<hran::Session> load_filtered(const std::string& corpus_path,
                                         const std::string& speaker) {
    std::vector<hran::Session> sessions = hran::load_corpus(corpus_path);
    if (sessions.empty()) throw hran::validation_error("corpus has no sessions");
    return hran::filter_turns(sessions, speaker_filter(speaker));
}

void check_dims(const hran::ModelParams& params,
                const std::vector<hran::Session>& sessions) {
    if (sessions.empty()) return;
    const size_t d = sessions.front().feature_dim();
    if (d != params.dims.feature_dim) {
        throw hran::validation_error(
            "checkpoint feature dimension " + std::to_string(params.dims.feature_dim) +
            " does not match corpus dimension " + std::to_string(d));
    }
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
    std::string out;
    std::string truth;  // default: <out>.truth.json
    hran::SynthConfig cfg;
    std::string placement = "uniform";
};

void add_gen(CLI::App& app, GenArgs& a) {
    CLI::App* cmd = app.add_subcommand("gen", "generate a synthetic planted-signal corpus");
    cmd->add_option("--out", a.out, "corpus output path")->required();
    cmd->add_option("--truth", a.truth,
                    "ground-truth sidecar path (default: <out>.truth.json)");
    cmd->add_option("--sessions", a.cfg.n_sessions, "number of sessions")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--balance", a.cfg.balance, "fraction of high-empathy sessions")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--turns-min", a.cfg.turns_min, "min turns per session")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--turns-max", a.cfg.turns_max, "max turns per session")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--sub-turns-min", a.cfg.sub_turns_min, "min sub-turns per turn")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--sub-turns-max", a.cfg.sub_turns_max, "max sub-turns per turn")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--dim", a.cfg.feature_dim, "feature dimension")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--signal-strength", a.cfg.signal_strength,
                    "class-dependent mean shift on signal turns")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--signal-fraction", a.cfg.signal_turn_fraction,
                    "fraction of turns carrying the signal, in (0,1]")
        ->capture_default_str()->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--placement", a.placement, "signal placement: uniform|runs")
        ->capture_default_str()->check(CLI::IsMember({"uniform", "runs"}));
    cmd->add_option("--run-len-min", a.cfg.run_len_min, "min planted run length")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--run-len-max", a.cfg.run_len_max, "max planted run length")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--noise-std", a.cfg.noise_std, "feature noise std")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", a.cfg.seed, "corpus seed")->capture_default_str();
}

int cmd_gen(GenArgs& a) {
    a.cfg.placement = a.placement == "runs" ? hran::Placement::contiguous_runs
                                            : hran::Placement::uniform;
    const std::string truth_path = a.truth.empty() ? a.out + ".truth.json" : a.truth;
    const hran::SynthCorpus corpus = hran::generate(a.cfg);
    hran::save_corpus(a.out, corpus.sessions,
                      static_cast<size_t>(a.cfg.feature_dim));
    hran::save_ground_truth(truth_path, corpus.ground_truth);

    ordered_json config{{"sessions", a.cfg.n_sessions},
                        {"balance", a.cfg.balance},
                        {"turns_min", a.cfg.turns_min},
                        {"turns_max", a.cfg.turns_max},
                        {"sub_turns_min", a.cfg.sub_turns_min},
                        {"sub_turns_max", a.cfg.sub_turns_max},
                        {"dim", a.cfg.feature_dim},
                        {"signal_strength", a.cfg.signal_strength},
                        {"signal_fraction", a.cfg.signal_turn_fraction},
                        {"placement", a.placement},
                        {"run_len_min", a.cfg.run_len_min},
                        {"run_len_max", a.cfg.run_len_max},
                        {"noise_std", a.cfg.noise_std}};
    ordered_json artifacts{{"corpus", fs::path(a.out).filename().string()},
                           {"ground_truth", fs::path(truth_path).filename().string()}};
    write_manifest(a.out + ".manifest.json", "gen", a.cfg.seed, std::move(config),
                   std::move(artifacts));
    std::cout << "wrote " << corpus.sessions.size() << " sessions to " << a.out << "\n";
    return 0;
}

// --- shared train/cv flags ---------------------------------------------------

struct FitArgs {
    std::string corpus;
    std::string out_dir;
    std::string variant = "hran";
    std::string speaker = "both";
    hran::TrainConfig cfg;
    int hidden_sub = 64;
    int hidden_turn = 16;
};

void add_fit_options(CLI::App* cmd, FitArgs& a) {
    cmd->add_option("--corpus", a.corpus, "corpus path")->required();
    cmd->add_option("--out-dir", a.out_dir, "output directory")->required();
    cmd->add_option("--epochs", a.cfg.epochs, "training epochs")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--lr", a.cfg.lr0, "initial learning rate")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--beta1", a.cfg.beta1, "Adam beta1")->capture_default_str();
    cmd->add_option("--beta2", a.cfg.beta2, "Adam beta2")->capture_default_str();
    cmd->add_option("--adam-epsilon", a.cfg.adam_epsilon, "Adam epsilon")
        ->capture_default_str();
    cmd->add_option("--decay-factor", a.cfg.lr_decay_factor, "LR decay multiplier")
        ->capture_default_str()->check(CLI::Range(1e-12, 1.0));
    cmd->add_option("--decay-every", a.cfg.lr_decay_every, "epochs between LR decays")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--hidden-sub", a.hidden_sub, "sub-turn GRU hidden size")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--hidden-turn", a.hidden_turn, "turn GRU hidden size")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--variant", a.variant, "model variant: hrn|hrsan|hrtan|hran")
        ->capture_default_str()->check(CLI::IsMember({"hrn", "hrsan", "hrtan", "hran"}));
    cmd->add_option("--speaker", a.speaker, "turns to keep: both|therapist|client")
        ->capture_default_str()->check(CLI::IsMember({"both", "therapist", "client"}));
    cmd->add_option("--seed", a.cfg.seed, "run seed")->capture_default_str();
}

void finish_fit_config(FitArgs& a) {
    a.cfg.flags = hran::flags_for(hran::variant_from_name(a.variant));
    a.cfg.dims.feature_dim = 0;  // taken from the data
    a.cfg.dims.hidden_sub = static_cast<size_t>(a.hidden_sub);
    a.cfg.dims.hidden_turn = static_cast<size_t>(a.hidden_turn);
}

ordered_json fit_config_json(const FitArgs& a) {
    return ordered_json{{"corpus", a.corpus},
                        {"epochs", a.cfg.epochs},
                        {"lr", a.cfg.lr0},
                        {"beta1", a.cfg.beta1},
                        {"beta2", a.cfg.beta2},
                        {"adam_epsilon", a.cfg.adam_epsilon},
                        {"decay_factor", a.cfg.lr_decay_factor},
                        {"decay_every", a.cfg.lr_decay_every},
                        {"hidden_sub", a.hidden_sub},
                        {"hidden_turn", a.hidden_turn},
                        {"variant", a.variant},
                        {"speaker", a.speaker}};
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
    FitArgs fit;
    double dev_fraction = 0.2;
    std::vector<std::string> dev_ids;
};

void add_train(CLI::App& app, TrainArgs& a) {
    CLI::App* cmd = app.add_subcommand("train", "train one model with a dev split");
    add_fit_options(cmd, a.fit);
    cmd->add_option("--dev-fraction", a.dev_fraction,
                    "fraction of sessions held out for model selection")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--dev-ids", a.dev_ids,
                    "comma-separated session ids to use as the dev set")
        ->delimiter(',');
}

// Stratified seeded dev split when no explicit id list is given.
void split_dev(const std::vector<hran::Session>& sessions,
               const TrainArgs& a, std::vector<hran::Session>& train_set,
               std::vector<hran::Session>& dev_set) {
    if (!a.dev_ids.empty()) {
        const std::set<std::string> dev(a.dev_ids.begin(), a.dev_ids.end());
        std::set<std::string> seen;
        for (const hran::Session& s : sessions) {
            (dev.count(s.id) ? dev_set : train_set).push_back(s);
            if (dev.count(s.id)) seen.insert(s.id);
        }
        for (const std::string& id : dev) {
            if (!seen.count(id)) {
                throw hran::validation_error("dev id not in corpus: " + id);
            }
        }
    } else {
        std::vector<size_t> highs, lows;
        for (size_t i = 0; i < sessions.size(); ++i) {
            if (!sessions[i].label) {
                throw hran::validation_error("unlabeled session '" + sessions[i].id + "'");
            }
            (*sessions[i].label == hran::Label::high ? highs : lows).push_back(i);
        }
        hran::Rng rng(hran::derive_seed(a.fit.cfg.seed, 3));
        rng.shuffle(highs);
        rng.shuffle(lows);
        size_t n_dev_high = static_cast<size_t>(
            std::llround(a.dev_fraction * static_cast<double>(highs.size())));
        size_t n_dev_low = static_cast<size_t>(
            std::llround(a.dev_fraction * static_cast<double>(lows.size())));
        if (n_dev_high + n_dev_low == 0) {
            (highs.size() >= lows.size() ? n_dev_high : n_dev_low) = 1;
        }
        std::vector<char> is_dev(sessions.size(), 0);
        for (size_t i = 0; i < n_dev_high && i < highs.size(); ++i) is_dev[highs[i]] = 1;
        for (size_t i = 0; i < n_dev_low && i < lows.size(); ++i) is_dev[lows[i]] = 1;
        for (size_t i = 0; i < sessions.size(); ++i) {
            (is_dev[i] ? dev_set : train_set).push_back(sessions[i]);
        }
    }
    if (train_set.empty() || dev_set.empty()) {
        throw hran::validation_error("dev split leaves an empty train or dev set");
    }
}

int cmd_train(TrainArgs& a) {
    finish_fit_config(a.fit);
    ensure_dir(a.fit.out_dir);
    const std::vector<hran::Session> sessions = load_filtered(a.fit.corpus, a.fit.speaker);

    std::vector<hran::Session> train_set, dev_set;
    split_dev(sessions, a, train_set, dev_set);

    auto [model, log] = hran::train(train_set, dev_set, a.fit.cfg);
    hran::save_checkpoint(join(a.fit.out_dir, "checkpoint.json"), model);
    hran::write_train_log(join(a.fit.out_dir, "train_log.tsv"), log);

    ordered_json config = fit_config_json(a.fit);
    config["dev_fraction"] = a.dev_fraction;
    config["dev_ids"] = a.dev_ids;
    ordered_json results;
    if (log.best_epoch) results["best_epoch"] = *log.best_epoch;
    write_manifest(join(a.fit.out_dir, "manifest.json"), "train", a.fit.cfg.seed,
                   std::move(config),
                   ordered_json{{"checkpoint", "checkpoint.json"},
                                {"train_log", "train_log.tsv"}},
                   std::move(results));
    std::cout << "trained on " << train_set.size() << " sessions; best epoch "
              << (log.best_epoch ? std::to_string(*log.best_epoch) : "none") << "\n";
    return 0;
}

// --- cv ------------------------------------------------------------------------

struct CvArgs {
    FitArgs fit;
    int k = 6;
    bool ablate = false;
    int parallel = 1;
};

void add_cv(CLI::App& app, CvArgs& a) {
    CLI::App* cmd = app.add_subcommand("cv", "k-fold cross-validation");
    add_fit_options(cmd, a.fit);
    cmd->add_option("--k", a.k, "fold count")
        ->capture_default_str()->check(CLI::Range(3, 1000));
    cmd->add_flag("--ablate", a.ablate, "compare hrn/hrsan/hrtan/hran on the same folds");
    cmd->add_option("--parallel", a.parallel, "folds trained concurrently")
        ->capture_default_str()->check(CLI::PositiveNumber);
}

int cmd_cv(CvArgs& a) {
    finish_fit_config(a.fit);
    ensure_dir(a.fit.out_dir);
    const std::vector<hran::Session> sessions = load_filtered(a.fit.corpus, a.fit.speaker);
    const hran::FoldPlan plan = hran::make_folds(sessions, a.k, a.fit.cfg.seed);

    ordered_json config = fit_config_json(a.fit);
    config["k"] = a.k;
    config["ablate"] = a.ablate;
    ordered_json artifacts;
    ordered_json results;

    if (a.ablate) {
        const std::vector<hran::AblationRow> rows =
            hran::run_ablations(sessions, plan, a.fit.cfg, a.parallel);
        hran::write_ablation_report(join(a.fit.out_dir, "ablation_report.tsv"), rows);
        artifacts["ablation_report"] = "ablation_report.tsv";
        for (const hran::AblationRow& row : rows) {
            results[hran::variant_name(row.variant)] = row.mean_accuracy;
        }
        std::cout << "ablation over " << a.k << " folds:\n";
        for (const hran::AblationRow& row : rows) {
            std::cout << "  " << hran::variant_name(row.variant) << "\t"
                      << row.mean_accuracy << "\n";
        }
    } else {
        const hran::CvResult cv = hran::run_cv(sessions, plan, a.fit.cfg, a.parallel);
        hran::write_cv_report(join(a.fit.out_dir, "cv_report.tsv"), cv);
        artifacts["cv_report"] = "cv_report.tsv";
        std::vector<hran::PredictionRow> pooled;
        for (int f = 0; f < a.k; ++f) {
            const hran::FoldOutcome& fold = cv.folds[static_cast<size_t>(f)];
            pooled.insert(pooled.end(), fold.eval.predictions.begin(),
                          fold.eval.predictions.end());
            const std::string ckpt = "checkpoint_fold_" + std::to_string(f) + ".json";
            const std::string tlog = "train_log_fold_" + std::to_string(f) + ".tsv";
            hran::save_checkpoint(join(a.fit.out_dir, ckpt), fold.model);
            hran::write_train_log(join(a.fit.out_dir, tlog), fold.log);
            artifacts["checkpoint_fold_" + std::to_string(f)] = ckpt;
            artifacts["train_log_fold_" + std::to_string(f)] = tlog;
        }
        hran::write_predictions(join(a.fit.out_dir, "predictions.tsv"), pooled);
        artifacts["predictions"] = "predictions.tsv";
        results["mean_accuracy"] = cv.mean_accuracy;
        std::cout << "mean accuracy over " << a.k << " folds: " << cv.mean_accuracy
                  << "\n";
    }

    write_manifest(join(a.fit.out_dir, "manifest.json"), "cv", a.fit.cfg.seed,
                   std::move(config), std::move(artifacts), std::move(results));
    return 0;
}

// --- analyze ---------------------------------------------------------------------

struct AnalyzeArgs {
    std::string corpus;
    std::string checkpoint;
    std::string out_dir;
    std::string speaker = "both";
    std::string ground_truth;
    double percentile = 70.0;
    int sections = 5;
};

void add_analyze(CLI::App& app, AnalyzeArgs& a) {
    CLI::App* cmd =
        app.add_subcommand("analyze", "attention-weight analysis of a checkpoint");
    cmd->add_option("--corpus", a.corpus, "corpus path")->required();
    cmd->add_option("--checkpoint", a.checkpoint, "model checkpoint path")->required();
    cmd->add_option("--out-dir", a.out_dir, "output directory")->required();
    cmd->add_option("--percentile", a.percentile, "important-turn percentile")
        ->capture_default_str()->check(CLI::Range(0.0, 100.0));
    cmd->add_option("--sections", a.sections, "session sections for the distribution")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--ground-truth", a.ground_truth,
                    "planted-signal sidecar for localization recall");
    cmd->add_option("--speaker", a.speaker, "turns to keep: both|therapist|client")
        ->capture_default_str()->check(CLI::IsMember({"both", "therapist", "client"}));
}

int cmd_analyze(AnalyzeArgs& a) {
    ensure_dir(a.out_dir);
    const hran::ModelParams model = hran::load_checkpoint(a.checkpoint);
    std::vector<hran::Session> sessions = hran::load_corpus(a.corpus);
    if (sessions.empty()) throw hran::validation_error("corpus has no sessions");
    sessions = hran::filter_turns(sessions, speaker_filter(a.speaker));
    check_dims(model, sessions);

    std::vector<hran::AttentionReport> reports;
    for (const hran::Session& s : sessions) {
        reports.push_back(hran::analyze_session(model, s, a.percentile, a.sections));
    }
    const hran::AnalysisSummary summary = hran::aggregate_reports(reports);
    hran::write_attention_reports(join(a.out_dir, "attention_reports.tsv"), reports);
    hran::write_analysis_summary(join(a.out_dir, "analysis_summary.tsv"), summary);

    ordered_json artifacts{{"attention_reports", "attention_reports.tsv"},
                           {"analysis_summary", "analysis_summary.tsv"}};
    ordered_json results;

    if (!a.ground_truth.empty()) {
        const auto truth = hran::load_ground_truth(a.ground_truth);
        std::ostringstream out;
        out << "id\trecall\n";
        double total = 0.0;
        size_t counted = 0;
        for (const hran::AttentionReport& rep : reports) {
            auto it = truth.find(rep.id);
            if (it == truth.end()) {
                throw hran::validation_error("no ground truth for session '" + rep.id +
                                             "'");
            }
            const double recall = hran::localization_recall(rep.important, it->second);
            out << rep.id << "\t" << hran::fmt_double(recall) << "\n";
            total += recall;
            ++counted;
        }
        const double mean = counted ? total / static_cast<double>(counted) : 0.0;
        out << "mean_recall\t" << hran::fmt_double(mean) << "\n";
        hran::write_file_atomic(join(a.out_dir, "localization.tsv"), out.str());
        artifacts["localization"] = "localization.tsv";
        results["mean_recall"] = mean;
        std::cout << "mean localization recall: " << mean << "\n";
    }

    ordered_json config{{"corpus", a.corpus},
                        {"checkpoint", fs::path(a.checkpoint).filename().string()},
                        {"percentile", a.percentile},
                        {"sections", a.sections},
                        {"speaker", a.speaker},
                        {"ground_truth",
                         a.ground_truth.empty()
                             ? ""
                             : fs::path(a.ground_truth).filename().string()}};
    write_manifest(join(a.out_dir, "manifest.json"), "analyze", 0, std::move(config),
                   std::move(artifacts), std::move(results));
    std::cout << "analyzed " << reports.size() << " sessions\n";
    return 0;
}

// --- eval ------------------------------------------------------------------------

struct EvalArgs {
    std::string corpus;
    std::string checkpoint;
    std::string out_dir;
    std::string speaker = "both";
};

void add_eval(CLI::App& app, EvalArgs& a) {
    CLI::App* cmd = app.add_subcommand("eval", "evaluate a checkpoint on a labeled corpus");
    cmd->add_option("--corpus", a.corpus, "corpus path")->required();
    cmd->add_option("--checkpoint", a.checkpoint, "model checkpoint path")->required();
    cmd->add_option("--out-dir", a.out_dir, "output directory")->required();
    cmd->add_option("--speaker", a.speaker, "turns to keep: both|therapist|client")
        ->capture_default_str()->check(CLI::IsMember({"both", "therapist", "client"}));
}

int cmd_eval(EvalArgs& a) {
    ensure_dir(a.out_dir);
    const hran::ModelParams model = hran::load_checkpoint(a.checkpoint);
    const std::vector<hran::Session> sessions = load_filtered(a.corpus, a.speaker);
    check_dims(model, sessions);

    const hran::EvalResult result = hran::evaluate(model, sessions);
    hran::write_eval_report(join(a.out_dir, "eval_report.tsv"), result);
    hran::write_predictions(join(a.out_dir, "predictions.tsv"), result.predictions);

    ordered_json config{{"corpus", a.corpus},
                        {"checkpoint", fs::path(a.checkpoint).filename().string()},
                        {"speaker", a.speaker}};
    write_manifest(join(a.out_dir, "manifest.json"), "eval", 0, std::move(config),
                   ordered_json{{"eval_report", "eval_report.tsv"},
                                {"predictions", "predictions.tsv"}},
                   ordered_json{{"accuracy", result.accuracy}});
    std::cout << "accuracy " << result.accuracy << " on " << sessions.size()
              << " sessions\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical recurrent attention network for two-speaker session "
                 "classification"};
    app.set_version_flag("--version", std::string("hran ") + kVersion);
    app.require_subcommand(1);

    GenArgs gen_args;
    TrainArgs train_args;
    CvArgs cv_args;
    AnalyzeArgs analyze_args;
    EvalArgs eval_args;
    add_gen(app, gen_args);
    add_train(app, train_args);
    add_cv(app, cv_args);
    add_analyze(app, analyze_args);
    add_eval(app, eval_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand("gen")) return cmd_gen(gen_args);
        if (app.got_subcommand("train")) return cmd_train(train_args);
        if (app.got_subcommand("cv")) return cmd_cv(cv_args);
        if (app.got_subcommand("analyze")) return cmd_analyze(analyze_args);
        if (app.got_subcommand("eval")) return cmd_eval(eval_args);
    } catch (const hran::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const hran::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
