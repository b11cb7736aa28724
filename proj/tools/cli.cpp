#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "gaitpd/analysis.hpp"
#include "gaitpd/baseline_wbam.hpp"
#include "gaitpd/config.hpp"
#include "gaitpd/detector.hpp"
#include "gaitpd/ingest.hpp"
#include "gaitpd/kinematics.hpp"
#include "gaitpd/optimize.hpp"
#include "gaitpd/synth.hpp"

namespace gaitpd::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

// trial.csv -> trial.label.json
fs::path label_path_for(const fs::path& csv) {
    auto p = csv;
    p.replace_extension(".label.json");
    return p;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return RunConfig{};
    return parse_run_config(read_file(path));
}

ingest::TrialRecording load_trial(const fs::path& csv, const std::optional<fs::path>& label, const RunConfig& cfg) {
    const auto text = read_file(csv.string());
    const double rate = cfg.sample_rate ? *cfg.sample_rate : ingest::infer_sample_rate(text);
    auto trial = ingest::parse_trial(text, rate, csv.stem().string());
    const auto label_file = label ? *label : label_path_for(csv);
    if (label || fs::exists(label_file)) trial.perturbation = ingest::label_from_json(read_file(label_file.string()));
    return trial;
}

std::vector<ingest::TrialRecording> load_trial_dir(const fs::path& dir, const RunConfig& cfg) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") csvs.push_back(entry.path());
    }
    std::sort(csvs.begin(), csvs.end());
    std::vector<ingest::TrialRecording> trials;
    for (const auto& csv : csvs) trials.push_back(load_trial(csv, std::nullopt, cfg));
    if (trials.empty()) throw Error(ErrorCode::EmptyTrialSet, "no .csv trials in " + dir.string());
    return trials;
}

// Trials from a directory when one is given, else the synthetic matrix from the config.
std::vector<ingest::TrialRecording> trial_set(const std::string& dir, const RunConfig& cfg) {
    if (!dir.empty()) return load_trial_dir(dir, cfg);
    if (cfg.paths.trial_dir) return load_trial_dir(*cfg.paths.trial_dir, cfg);
    return synth::generate_matrix(cfg.gait_model, cfg.matrix);
}

std::string opt_number(const std::optional<double>& v) {
    if (!v) return "";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", *v);
    return buf;
}

std::string opt_index(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }

constexpr const char* kRowHeader = "trial_id,tp,fp,tn,fn,delay_pct,detection_sample,onset_sample";

std::string row_line(const detector::TrialRow& r) {
    return r.trial_id + "," + std::to_string(r.tp) + "," + std::to_string(r.fp) + "," + std::to_string(r.tn) + "," +
           std::to_string(r.fn) + "," + opt_number(r.delay_pct) + "," + opt_index(r.detection_sample) + "," +
           opt_index(r.onset_sample);
}

std::string rows_csv(const std::vector<detector::TrialRow>& rows) {
    std::string out = std::string(kRowHeader) + "\n";
    for (const auto& r : rows) out += row_line(r) + "\n";
    return out;
}

std::string summary_line(const analysis::EvaluationReport& rep) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s: accuracy %s (tp %zu fp %zu tn %zu fn %zu) delay %s%% sd %s%%\n",
                  rep.detector.c_str(), analysis::format_percent(rep.accuracy).c_str(), rep.tp, rep.fp, rep.tn,
                  rep.fn, rep.delay_mean ? opt_number(rep.delay_mean).c_str() : "-",
                  rep.delay_sd ? opt_number(rep.delay_sd).c_str() : "-");
    return buf;
}

std::vector<detector::TrialRow> kinematic_rows(std::span<const ingest::TrialRecording> trials, const RunConfig& cfg,
                                               double threshold) {
    auto pipeline = cfg.pipeline;
    pipeline.detector.threshold_phi = threshold;
    const auto traces = optimize::compute_traces(trials, pipeline);
    return optimize::classify_all(traces, threshold, pipeline.detector.tp_window_cycles);
}

std::vector<detector::TrialRow> wbam_rows(std::span<const ingest::TrialRecording> trials, const RunConfig& cfg) {
    std::vector<detector::TrialRow> rows;
    for (const auto& t : trials) {
        auto r = baseline::evaluate_trial(t, cfg.wbam).rows;
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return rows;
}

struct Options {
    std::string config;
    std::string in;
    std::string label;
    std::string out;
    std::string trials;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
    std::string id = "trial";
    std::string mode;
    std::optional<std::size_t> history;
    std::optional<std::size_t> k;
    bool no_standardize = false;
    std::string which = "both";
    bool print_config = false;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Kinematic ground-perturbation detector", "gaitpd"};
    app.require_subcommand(0, 1);
    app.add_flag("--print-config", o.print_config, "Print the default run configuration as JSON and exit");
    app.footer("Every subcommand accepts --config FILE, a JSON document whose keys mirror the output of "
               "--print-config; unknown keys are rejected. GAITPD_THREADS caps worker threads.");

    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", o.config, "Run configuration JSON"); };

    auto* simulate = app.add_subcommand("simulate", "Generate one synthetic trial (CSV plus label sidecar)");
    add_config(simulate);
    simulate->add_option("--out", o.out, "Output CSV path")->required();
    simulate->add_option("--seed", o.seed, "Override synth.seed");
    simulate->add_option("--id", o.id, "Trial id")->capture_default_str();

    auto* matrix = app.add_subcommand("matrix", "Generate the synthetic trial matrix into a directory");
    add_config(matrix);
    matrix->add_option("--out", o.out, "Output directory")->required();

    auto* detect = app.add_subcommand("detect", "Run the kinematic detector over one trial");
    add_config(detect);
    detect->add_option("--in", o.in, "Trial CSV")->required();
    detect->add_option("--label", o.label, "Label sidecar (default: <in>.label.json when present)");
    detect->add_option("--threshold", o.threshold, "Detection threshold on phi")->default_str("0.125");
    detect->add_option("--out", o.out, "JSONL detection stream");

    auto* base = app.add_subcommand("baseline", "Run the WBAM threshold baseline over one trial");
    add_config(base);
    base->add_option("--in", o.in, "Trial CSV with WBAM columns")->required();
    base->add_option("--label", o.label, "Label sidecar");
    base->add_option("--history", o.history, "Cycles used to fit the band (3-5)")->default_str("3");
    base->add_option("--mode", o.mode, "either_plane or per_plane_average")->default_str("either_plane");

    auto* sweep = app.add_subcommand("sweep", "Sweep the detection threshold over a trial set");
    add_config(sweep);
    sweep->add_option("--trials", o.trials, "Directory of trial CSVs (default: synthetic matrix from config)");
    sweep->add_option("--out", o.out, "Sweep CSV")->required();

    auto* pca = app.add_subcommand("pca", "Principal components of one trial's state sequence");
    add_config(pca);
    pca->add_option("--in", o.in, "Trial CSV")->required();
    pca->add_option("--k", o.k, "Components to keep")->default_str("3");
    pca->add_flag("--no-standardize", o.no_standardize, "Analyse raw covariance");
    pca->add_option("--out", o.out, "Scores CSV");

    auto* evaluate = app.add_subcommand("evaluate", "Score a trial set with the kinematic detector and/or WBAM");
    add_config(evaluate);
    evaluate->add_option("--trials", o.trials, "Directory of trial CSVs (default: synthetic matrix from config)");
    evaluate->add_option("--threshold", o.threshold, "Detection threshold on phi")->default_str("0.125");
    evaluate->add_option("--detector", o.which, "kinematic, wbam or both")
        ->check(CLI::IsMember({"kinematic", "wbam", "both"}))
        ->capture_default_str();
    evaluate->add_option("--out", o.out, "Report JSON (both reports in an array when --detector both)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (o.print_config) {
            out << run_config_to_json(RunConfig{});
            return kOk;
        }
        if (app.get_subcommands().empty()) {
            err << "error: a subcommand is required (see --help)\n";
            return kUsage;
        }
        auto cfg = load_config(o.config);

        if (simulate->parsed()) {
            if (o.seed) cfg.gait_model.seed = *o.seed;
            const auto trial = synth::generate_trial(cfg.gait_model, cfg.perturbation, o.id);
            const fs::path csv = o.out;
            write_file(csv, ingest::serialize_trial(trial));
            write_file(label_path_for(csv), ingest::label_to_json(trial.perturbation));
            return kOk;
        }
        if (matrix->parsed()) {
            const auto trials = synth::generate_matrix(cfg.gait_model, cfg.matrix);
            const fs::path dir = o.out;
            for (const auto& t : trials) {
                write_file(dir / (t.trial_id + ".csv"), ingest::serialize_trial(t));
                write_file(dir / (t.trial_id + ".label.json"), ingest::label_to_json(t.perturbation));
            }
            out << trials.size() << " trials written to " << dir.string() << "\n";
            return kOk;
        }
        if (detect->parsed()) {
            auto trial = load_trial(o.in, o.label.empty() ? std::nullopt : std::optional<fs::path>(o.label), cfg);
            auto pipeline = cfg.pipeline;
            if (o.threshold) pipeline.detector.threshold_phi = *o.threshold;
            pipeline.detector.validate();
            const auto a = detector::analyze_trial(std::move(trial), pipeline);
            if (!o.out.empty()) {
                std::string stream;
                for (const auto& s : a.samples) stream += detector::to_json_line(s) + "\n";
                write_file(o.out, stream);
            }
            auto row = detector::classify_and_delay(a.phi_trace(), a.cycles, a.truth, pipeline.detector.threshold_phi,
                                                    pipeline.detector.tp_window_cycles);
            row.trial_id = a.trial_id;
            out << kRowHeader << "\n" << row_line(row) << "\n";
            return kOk;
        }
        if (base->parsed()) {
            const auto trial =
                load_trial(o.in, o.label.empty() ? std::nullopt : std::optional<fs::path>(o.label), cfg);
            if (o.history) cfg.wbam.history_cycles = *o.history;
            if (o.mode == "either_plane") {
                cfg.wbam.mode = baseline::CombineMode::either_plane;
            } else if (o.mode == "per_plane_average") {
                cfg.wbam.mode = baseline::CombineMode::per_plane_average;
            } else if (!o.mode.empty()) {
                err << "error: --mode must be either_plane or per_plane_average\n";
                return kUsage;
            }
            cfg.wbam.validate();
            out << rows_csv(baseline::evaluate_trial(trial, cfg.wbam).rows);
            return kOk;
        }
        if (sweep->parsed()) {
            const auto trials = trial_set(o.trials, cfg);
            const auto result = optimize::sweep(trials, cfg.pipeline, cfg.sweep);
            std::ostringstream csv;
            optimize::write_sweep_csv(csv, result);
            write_file(o.out, csv.str());
            const auto& p = result.points[result.chosen];
            char buf[160];
            std::snprintf(buf, sizeof(buf), "selected threshold %.6g: accuracy %s, fp %zu, fn %zu\n", p.threshold,
                          analysis::format_percent(p.accuracy).c_str(), p.fp, p.fn);
            out << buf;
            return kOk;
        }
        if (pca->parsed()) {
            auto trial = load_trial(o.in, std::nullopt, cfg);
            ingest::repair_trial(trial, cfg.pipeline.max_gap);
            const auto states = kinematics::build_state_sequence(trial, cfg.pipeline.kinematics);
            const auto result = analysis::pca(analysis::Matrix::from_states(states), o.k.value_or(cfg.pca.k),
                                              cfg.pca.standardize && !o.no_standardize);
            if (!o.out.empty()) {
                std::ostringstream csv;
                analysis::write_scores_csv(csv, result);
                write_file(o.out, csv.str());
            }
            const auto ratio = result.explained_ratio();
            out << "component,explained_variance,explained_ratio\n";
            for (std::size_t i = 0; i < ratio.size(); ++i) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", i + 1, result.explained_variance[i], ratio[i]);
                out << buf;
            }
            for (auto c : result.dropped) err << "note: dropped constant state " << kStateNames[c] << "\n";
            return kOk;
        }
        if (evaluate->parsed()) {
            const auto trials = trial_set(o.trials, cfg);
            const double threshold = o.threshold.value_or(cfg.pipeline.detector.threshold_phi);
            std::vector<analysis::EvaluationReport> reports;
            if (o.which != "wbam") reports.push_back(analysis::evaluate(kinematic_rows(trials, cfg, threshold), "kinematic"));
            if (o.which != "kinematic") reports.push_back(analysis::evaluate(wbam_rows(trials, cfg), "wbam"));
            for (const auto& r : reports) out << summary_line(r);
            if (!o.out.empty()) {
                std::string doc;
                if (reports.size() == 1) {
                    doc = analysis::report_to_json(reports[0]);
                } else {
                    doc = "[\n" + analysis::report_to_json(reports[0]) + ",\n" + analysis::report_to_json(reports[1]) +
                          "\n]";
                }
                write_file(o.out, doc + "\n");
            }
            return kOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}

}  // namespace gaitpd::cli
