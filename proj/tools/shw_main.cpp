#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "shw/io.hpp"
#include "shw/pipeline.hpp"
#include "shw/synth.hpp"
#include "shw/tuning.hpp"

namespace fs = std::filesystem;

namespace {

struct DetectorOptions {
    shw::DetectConfig config;
    std::string format = "auto";
    int f0 = 0;
    std::string coverage = "inclusive";
    std::string teeth_mode = "formula";
};

void add_detector_flags(CLI::App* cmd, DetectorOptions& opt) {
    cmd->add_option("--tau", opt.config.window.tau_s, "Window length in seconds");
    cmd->add_option("--stride", opt.config.window.stride_s, "Window shift in seconds");
    cmd->add_option("--pad-factor", opt.config.window.pad_factor, "FFT zero-padding multiplier");
    cmd->add_option("--hp-cutoff", opt.config.window.hp_cutoff_hz,
                    "Zero spectrum bins at or below this frequency (Hz)");
    cmd->add_option("--delta", opt.config.params.delta, "Walking score threshold");
    cmd->add_option("--harmonics", opt.config.params.n_m, "Comb harmonic count");
    cmd->add_option("--fmin", opt.config.params.f_min, "Lowest candidate frequency (Hz)");
    cmd->add_option("--fmax", opt.config.params.f_max, "Highest candidate frequency (Hz)");
    cmd->add_option("--score-cap", opt.config.params.score_cap,
                    "Finite stand-in for an all-in-comb score");
    cmd->add_option("--coverage", opt.coverage, "Epoch voting span: inclusive|interior");
    cmd->add_option("--teeth-count-mode", opt.teeth_mode, "Comb teeth count: formula|prose");
    cmd->add_option("--threads", opt.config.threads, "Worker threads for window scoring");
    cmd->add_option("--chunk-samples", opt.config.chunk_samples, "Reader chunk size in samples");
    cmd->add_option("--format", opt.format, "Input format: auto|bin|csv");
    cmd->add_option("--f0", opt.f0, "Sampling frequency for CSV input (Hz)");
}

void resolve_detector_flags(DetectorOptions& opt) {
    if (opt.coverage == "inclusive") {
        opt.config.coverage = shw::Coverage::inclusive;
    } else if (opt.coverage == "interior") {
        opt.config.coverage = shw::Coverage::interior;
    } else {
        throw shw::config_error("unknown coverage mode: " + opt.coverage);
    }
    if (opt.teeth_mode == "formula") {
        opt.config.params.teeth_mode = shw::TeethCountMode::formula;
    } else if (opt.teeth_mode == "prose") {
        opt.config.params.teeth_mode = shw::TeethCountMode::prose;
    } else {
        throw shw::config_error("unknown teeth count mode: " + opt.teeth_mode);
    }
}

shw::SignalFormat parse_format(const std::string& name) {
    if (name == "auto") return shw::SignalFormat::auto_detect;
    if (name == "bin" || name == "binary") return shw::SignalFormat::binary;
    if (name == "csv") return shw::SignalFormat::csv;
    throw shw::config_error("unknown signal format: " + name);
}

fs::path resolve_relative(const fs::path& base, const fs::path& p) {
    return p.is_absolute() ? p : base / p;
}

int run_detect(const std::string& input, const std::string& output, DetectorOptions& opt) {
    resolve_detector_flags(opt);
    auto reader = shw::open_signal(input, parse_format(opt.format), opt.f0);
    const auto report = shw::detect_to_files(*reader, opt.config, output);
    std::cout << "epochs: " << report.n_epochs << "\n"
              << "walking_seconds: " << report.summary.walking_epochs << "\n"
              << "bouts: " << report.summary.n_bouts << "\n"
              << "outputs: " << output << "\n";
    return 0;
}

int run_simulate(const shw::CorpusSpec& spec, std::uint64_t seed, const std::string& output) {
    const auto manifest = shw::make_corpus(spec, seed, output);
    double walking = 0.0;
    for (const auto& s : manifest.subjects) walking += s.walking_seconds;
    std::cout << "subjects: " << manifest.subjects.size() << "\n"
              << "walking_seconds_total: " << walking << "\n"
              << "manifest: " << (fs::path(output) / "manifest.json").string() << "\n";
    return 0;
}

int run_tune_delta(const std::string& manifest_path, const std::string& output,
                   const std::string& summary_path, int nm_min, int nm_max,
                   DetectorOptions& opt) {
    resolve_detector_flags(opt);
    if (nm_min < 2 || nm_max < nm_min) throw shw::config_error("bad harmonic range");
    const auto subjects = shw::read_subject_manifest(manifest_path);
    if (subjects.empty()) throw shw::insufficient_data_error("manifest lists no subjects");
    const fs::path base = fs::path(manifest_path).parent_path();

    std::vector<shw::DeltaRow> rows;
    std::map<int, std::vector<double>> by_nm;
    for (const auto& subject : subjects) {
        const auto signal = shw::read_signal(resolve_relative(base, subject.signal_path),
                                             parse_format(opt.format), opt.f0);
        const auto labels = shw::read_labels(resolve_relative(base, subject.label_path));
        for (int n_m = nm_min; n_m <= nm_max; ++n_m) {
            shw::DetectConfig cfg = opt.config;
            cfg.params.n_m = n_m;
            const auto result = shw::detect_signal(signal, cfg);
            const auto scores = shw::split_scores(result.epochs, labels, subject.subject_id);
            const auto est = shw::estimate_delta_subject(scores);
            rows.push_back({subject.subject_id, n_m, est.delta});
            by_nm[n_m].push_back(est.delta);
        }
    }
    shw::write_delta_csv(output, rows);

    if (!summary_path.empty()) {
        nlohmann::json j;
        auto arr = nlohmann::json::array();
        for (const auto& [n_m, deltas] : by_nm) {
            const auto box = shw::stats::five_number(deltas);
            nlohmann::json row;
            row["n_m"] = n_m;
            row["population_delta"] = shw::estimate_delta_population(deltas);
            row["min"] = box.min;
            row["q1"] = box.q1;
            row["median"] = box.median;
            row["q3"] = box.q3;
            row["max"] = box.max;
            arr.push_back(std::move(row));
        }
        j["per_nm"] = std::move(arr);
        shw::AtomicFile file(summary_path);
        file.stream() << j.dump(2) << '\n';
        file.commit();
    }
    for (const auto& [n_m, deltas] : by_nm) {
        std::cout << "n_m=" << n_m << " population_delta="
                  << shw::format_double(shw::estimate_delta_population(deltas)) << "\n";
    }
    return 0;
}

int run_cv_study(const std::string& manifest_path, const std::string& output, int nm_min,
                 int nm_max, DetectorOptions& opt) {
    resolve_detector_flags(opt);
    const auto subjects = shw::read_subject_manifest(manifest_path);
    if (subjects.empty()) throw shw::insufficient_data_error("manifest lists no subjects");
    const fs::path base = fs::path(manifest_path).parent_path();

    std::vector<shw::CvRow> rows;
    for (const auto& subject : subjects) {
        const auto signal = shw::read_signal(resolve_relative(base, subject.signal_path),
                                             parse_format(opt.format), opt.f0);
        const auto labels = shw::read_labels(resolve_relative(base, subject.label_path));
        const auto cells = shw::cv_study(signal, labels, nm_min, nm_max, opt.config);
        for (const auto& cell : cells) rows.push_back({subject.subject_id, cell.n_m, cell.cv});
    }
    shw::write_cv_csv(output, rows);
    return 0;
}

int run_roc(const std::string& input, const std::string& labels_path, const std::string& output,
            DetectorOptions& opt) {
    resolve_detector_flags(opt);
    const auto signal = shw::read_signal(input, parse_format(opt.format), opt.f0);
    const auto labels = shw::read_labels(labels_path);
    const auto result = shw::detect_signal(signal, opt.config);

    std::vector<double> scores;
    scores.reserve(result.epochs.size());
    for (const auto& e : result.epochs) scores.push_back(e.score);
    const auto truth = labels.walking_epochs(static_cast<std::int64_t>(scores.size()));
    const auto roc = shw::roc_curve(scores, truth);

    fs::create_directories(output);
    shw::write_roc_csv(fs::path(output) / "roc.csv", roc.points);
    std::int64_t n_walking = 0;
    for (bool t : truth) n_walking += t ? 1 : 0;
    shw::write_roc_json(fs::path(output) / "roc.json", roc.auc,
                        static_cast<std::int64_t>(truth.size()), n_walking);
    std::cout << "auc: " << shw::format_double(roc.auc) << "\n";
    return 0;
}

int run_overlap(const std::string& a_path, const std::string& b_path, const std::string& metric,
                std::int64_t span_s, const std::string& output) {
    const auto a = shw::read_labels(a_path);
    const auto b = shw::read_labels(b_path);
    shw::OverlapMetric m;
    if (metric == "jaccard") {
        m = shw::OverlapMetric::jaccard;
    } else if (metric == "recall") {
        m = shw::OverlapMetric::recall;
    } else {
        throw shw::config_error("unknown overlap metric: " + metric);
    }
    if (span_s <= 0) {
        span_s = static_cast<std::int64_t>(std::ceil(std::max(a.end_s(), b.end_s())));
    }
    const double overlap = shw::label_overlap(a.walking_epochs(span_s), b.walking_epochs(span_s), m);
    if (!output.empty()) {
        shw::AtomicFile file(output);
        file.stream() << "a,b,metric,span_s,overlap\n"
                      << a_path << ',' << b_path << ',' << metric << ',' << span_s << ','
                      << shw::format_double(overlap) << '\n';
        file.commit();
    }
    std::cout << shw::format_double(overlap) << "\n";
    return 0;
}

int run_summarize(const std::string& epochs_path, const std::string& bouts_path,
                  const std::string& output) {
    const auto epochs = shw::read_epochs_csv(epochs_path);
    const auto bouts = shw::read_bouts_csv(bouts_path);
    const std::int64_t n_epochs = epochs.empty() ? 0 : epochs.back().epoch_index + 1;
    const auto summary = shw::build_summary(epochs, bouts, shw::default_bout_bands(), n_epochs);
    fs::create_directories(output);
    shw::write_summary_json(fs::path(output) / "summary.json", summary);
    shw::write_hourly_csv(fs::path(output) / "hourly_matrix.csv",
                          shw::hourly_walking_matrix(epochs));
    shw::write_bands_csv(fs::path(output) / "bout_bands.csv", summary);
    std::cout << "outputs: " << output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sustained harmonic walking detection for raw tri-axial accelerometry"};
    app.require_subcommand(1);

    // detect
    auto* detect = app.add_subcommand("detect", "Run detection and write epoch/bout/summary files");
    std::string detect_input;
    std::string detect_output;
    DetectorOptions detect_opt;
    detect->add_option("--input", detect_input, "Signal file")->required();
    detect->add_option("--output", detect_output, "Output directory")->required();
    add_detector_flags(detect, detect_opt);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic corpus");
    std::string sim_output;
    shw::CorpusSpec corpus;
    std::uint64_t sim_seed = 1;
    double sim_days = 0.0;
    simulate->add_option("--output", sim_output, "Output directory")->required();
    simulate->add_option("--subjects", corpus.n_subjects, "Number of subjects");
    simulate->add_option("--duration-s", corpus.duration_s, "Recording length per subject (s)");
    simulate->add_option("--days", sim_days, "Recording length per subject (days)");
    simulate->add_option("--f0", corpus.f0, "Sampling frequency (Hz)");
    simulate->add_option("--seed", sim_seed, "Corpus seed");
    simulate->add_option("--w-rest", corpus.w_rest, "Mixture weight: rest");
    simulate->add_option("--w-position", corpus.w_position, "Mixture weight: position change");
    simulate->add_option("--w-compound", corpus.w_compound, "Mixture weight: compound");
    simulate->add_option("--w-walk", corpus.w_walk, "Mixture weight: harmonic walk");
    simulate->add_option("--walk-fmin", corpus.walk_fmin_hz, "Lowest planted walk frequency");
    simulate->add_option("--walk-fmax", corpus.walk_fmax_hz, "Highest planted walk frequency");
    simulate->add_option("--noise-sd", corpus.noise_sd, "Sensor noise level (g)");
    simulate->add_option("--max-drift", corpus.max_drift_hz_per_s, "Max walk frequency drift (Hz/s)");
    simulate->add_option("--start-unix", corpus.start_unix, "Recording start (UTC seconds)");

    // tune-delta
    auto* tune = app.add_subcommand("tune-delta", "Estimate the walking threshold from labeled data");
    std::string tune_manifest;
    std::string tune_output;
    std::string tune_summary;
    int tune_nm_min = 6;
    int tune_nm_max = 6;
    DetectorOptions tune_opt;
    tune->add_option("--manifest", tune_manifest, "CSV of subject_id,signal_path,label_path")
        ->required();
    tune->add_option("--output", tune_output, "Delta table CSV")->required();
    tune->add_option("--summary", tune_summary, "Optional per-n_m population summary JSON");
    tune->add_option("--nm-min", tune_nm_min, "Lowest harmonic count");
    tune->add_option("--nm-max", tune_nm_max, "Highest harmonic count");
    add_detector_flags(tune, tune_opt);

    // cv-study
    auto* cv = app.add_subcommand("cv-study", "IWF coefficient of variation vs harmonic count");
    std::string cv_manifest;
    std::string cv_output;
    int cv_nm_min = 2;
    int cv_nm_max = 17;
    DetectorOptions cv_opt;
    cv->add_option("--manifest", cv_manifest, "CSV of subject_id,signal_path,label_path")
        ->required();
    cv->add_option("--output", cv_output, "CV table CSV")->required();
    cv->add_option("--nm-min", cv_nm_min, "Lowest harmonic count");
    cv->add_option("--nm-max", cv_nm_max, "Highest harmonic count");
    add_detector_flags(cv, cv_opt);

    // roc
    auto* roc = app.add_subcommand("roc", "ROC curve and AUC against interval labels");
    std::string roc_input;
    std::string roc_labels;
    std::string roc_output;
    DetectorOptions roc_opt;
    roc->add_option("--input", roc_input, "Signal file")->required();
    roc->add_option("--labels", roc_labels, "Label CSV")->required();
    roc->add_option("--output", roc_output, "Output directory")->required();
    add_detector_flags(roc, roc_opt);

    // overlap
    auto* overlap = app.add_subcommand("overlap", "Walking-set agreement between two label tracks");
    std::string overlap_a;
    std::string overlap_b;
    std::string overlap_metric = "jaccard";
    std::string overlap_output;
    std::int64_t overlap_span = 0;
    overlap->add_option("--a", overlap_a, "First label CSV")->required();
    overlap->add_option("--b", overlap_b, "Second label CSV")->required();
    overlap->add_option("--metric", overlap_metric, "jaccard|recall");
    overlap->add_option("--span-s", overlap_span, "Comparison span in seconds");
    overlap->add_option("--output", overlap_output, "Optional overlap report CSV");

    // summarize
    auto* summarize = app.add_subcommand("summarize", "Recompute summaries from saved outputs");
    std::string sum_epochs;
    std::string sum_bouts;
    std::string sum_output;
    summarize->add_option("--epochs", sum_epochs, "epochs.csv from a detect run")->required();
    summarize->add_option("--bouts", sum_bouts, "bouts.csv from a detect run")->required();
    summarize->add_option("--output", sum_output, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) return run_detect(detect_input, detect_output, detect_opt);
        if (simulate->parsed()) {
            if (sim_days > 0) corpus.duration_s = sim_days * 86400.0;
            return run_simulate(corpus, sim_seed, sim_output);
        }
        if (tune->parsed()) {
            return run_tune_delta(tune_manifest, tune_output, tune_summary, tune_nm_min,
                                  tune_nm_max, tune_opt);
        }
        if (cv->parsed()) return run_cv_study(cv_manifest, cv_output, cv_nm_min, cv_nm_max, cv_opt);
        if (roc->parsed()) return run_roc(roc_input, roc_labels, roc_output, roc_opt);
        if (overlap->parsed()) {
            return run_overlap(overlap_a, overlap_b, overlap_metric, overlap_span, overlap_output);
        }
        if (summarize->parsed()) return run_summarize(sum_epochs, sum_bouts, sum_output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
