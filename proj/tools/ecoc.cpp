// ecoc command-line tool. Every output file starts with a metadata block
// (tool version, command line, seeds) and contains no timestamps, so reruns
// with identical flags are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ecoc/codebook.hpp"
#include "ecoc/decoding.hpp"
#include "ecoc/error.hpp"
#include "ecoc/io.hpp"
#include "ecoc/metrics.hpp"
#include "ecoc/pseudolabel.hpp"
#include "ecoc/selftest.hpp"
#include "ecoc/sim_config.hpp"
#include "ecoc/simulator.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace ecoc;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNumeric = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string g_command;

ojson meta(const std::vector<std::uint64_t>& seeds) {
    ojson m;
    m["tool"] = "ecoc";
    m["version"] = ECOC_VERSION;
    m["command"] = g_command;
    m["seeds"] = seeds;
    return m;
}

OutputHeader header(const std::vector<std::uint64_t>& seeds) { return {g_command, seeds}; }

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

ojson stats_json(const Codebook& cb) {
    const auto s = separation_stats(cb);
    ojson j;
    j["n_classes"] = cb.n_classes();
    j["code_length"] = cb.code_length();
    j["d_min_row"] = s.d_min_row;
    j["d_min_col"] = s.d_min_col;
    j["d_max_col"] = s.d_max_col;
    j["d_mean_row"] = s.d_mean_row;
    j["correctable_bits"] = s.correctable_bits;
    return j;
}

std::string stats_line(const Codebook& cb) {
    const auto s = separation_stats(cb);
    return "n_classes=" + std::to_string(cb.n_classes()) + " code_length=" + std::to_string(cb.code_length()) +
           " d_min_row=" + std::to_string(s.d_min_row) + " d_min_col=" + std::to_string(s.d_min_col) +
           " d_max_col=" + std::to_string(s.d_max_col) + " d_mean_row=" + format_double(s.d_mean_row) +
           " correctable_bits=" + std::to_string(s.correctable_bits);
}

std::vector<std::string> read_names(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t");
        names.push_back(line.substr(b, e - b + 1));
    }
    return names;
}

// Roughly 10 log2 N, rounded to the nearest multiple of 4.
std::size_t default_length(std::size_t n) {
    const double k = 10.0 * std::log2(static_cast<double>(n));
    return std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(k / 4.0)) * 4);
}

Codebook load_valid(const std::string& path) {
    auto loaded = load(path);
    if (!loaded.report.ok()) throw ValidationError("codebook " + path + " is invalid", loaded.report.violations);
    return std::move(loaded.codebook);
}

ProbabilityMatrix load_probs(const std::string& path, const Codebook& cb) {
    auto m = read_probabilities(path);
    if (m.rows == 0) throw ValidationError(path + ": no pixels");
    if (m.cols != cb.code_length())
        throw ValidationError(path + ": " + std::to_string(m.cols) + " columns, codebook has K=" +
                              std::to_string(cb.code_length()));
    for (std::size_t i = 0; i < m.rows; ++i) {
        try {
            check_probabilities(m.row(i));
        } catch (const std::invalid_argument&) {
            throw ValidationError(path + ": pixel " + std::to_string(i) + " has a value outside [0, 1]");
        }
    }
    return m;
}

// ---- codebook-gen ----------------------------------------------------------

struct GenArgs {
    std::string strategy = "mmd";
    std::size_t classes = 0;
    std::string names;
    std::size_t length = 0;
    std::uint64_t iters = 100000;
    std::uint64_t seed = 0;
    std::string embeddings;
    std::string out;
    CLI::Option* seed_opt = nullptr;
};

int run_codebook_gen(const GenArgs& a, unsigned threads) {
    std::vector<std::string> names;
    if (!a.names.empty()) names = read_names(a.names);
    std::size_t n = a.classes;
    if (!names.empty()) {
        if (n != 0 && n != names.size())
            throw UsageError("--classes " + std::to_string(n) + " disagrees with " + std::to_string(names.size()) +
                             " names in " + a.names);
        n = names.size();
    }

    Codebook cb = one_hot(2);
    std::optional<std::uint64_t> seed;
    if (a.strategy == "text") {
        if (a.embeddings.empty()) throw UsageError("--strategy text requires --embeddings");
        auto emb = load_embeddings(a.embeddings);
        if (!names.empty()) emb = select_embeddings(emb, names);
        if (n != 0 && n != emb.size())
            throw UsageError("--classes " + std::to_string(n) + " disagrees with " + std::to_string(emb.size()) +
                             " embeddings");
        const std::size_t k = a.length ? a.length : default_length(emb.size());
        cb = generate_text(emb, k);
    } else {
        if (!a.embeddings.empty()) throw UsageError("--embeddings only applies to --strategy text");
        if (n < 2) throw UsageError("--strategy " + a.strategy + " requires --classes N >= 2 or --names");
        if (a.strategy == "onehot") {
            if (a.length && a.length != n) throw UsageError("onehot codebooks have --length equal to --classes");
            cb = one_hot(n);
        } else {
            if (a.seed_opt->count() == 0) throw UsageError("--strategy mmd requires an explicit --seed");
            const std::size_t k = a.length ? a.length : default_length(n);
            cb = generate_mmd({n, k, a.iters, a.seed, threads});
            seed = a.seed;
        }
        if (!names.empty()) cb.class_names = names;
    }
    const auto report = validate(cb);
    if (!report.ok()) throw ValidationError("generated codebook is invalid", report.violations);
    save(cb, a.out, {g_command, seed});
    std::cout << stats_line(cb) << "\n";
    return kOk;
}

// ---- codebook-validate / codebook-stats ------------------------------------

int run_codebook_validate(const std::string& path) {
    const auto loaded = load(path);
    if (loaded.report.ok()) {
        std::cout << "valid " << stats_line(loaded.codebook) << "\n";
        return kOk;
    }
    for (const auto& v : loaded.report.violations) std::cout << "violation: " << v << "\n";
    throw ValidationError("codebook " + path + " has " + std::to_string(loaded.report.violations.size()) +
                          " violation(s)");
}

struct StatsArgs {
    std::string codebook;
    std::string out;
    double eps = 0.3;
    double gamma = 1.0;
    double gamma_hat = 0.0;
    double kappa = 1.0;
};

int run_codebook_stats(const StatsArgs& a) {
    const auto loaded = load(a.codebook);
    const Codebook& cb = loaded.codebook;
    const double threshold =
        theorem2_threshold(cb.code_length(), cb.n_classes(), a.eps, a.gamma, a.gamma_hat, a.kappa);
    const bool holds = satisfies_theorem2(cb, a.eps, a.gamma, a.gamma_hat, a.kappa);
    std::cout << stats_line(cb) << " valid=" << (loaded.report.ok() ? 1 : 0)
              << " distance_threshold=" << format_double(threshold) << " threshold_met=" << (holds ? 1 : 0) << "\n";
    if (!a.out.empty()) {
        ojson j;
        j["meta"] = meta(cb.seed ? std::vector<std::uint64_t>{*cb.seed} : std::vector<std::uint64_t>{});
        j["stats"] = stats_json(cb);
        j["valid"] = loaded.report.ok();
        j["violations"] = loaded.report.violations;
        j["distance_condition"] = {{"eps", a.eps},           {"gamma", a.gamma},   {"gamma_hat", a.gamma_hat},
                                   {"kappa", a.kappa},       {"threshold", threshold}, {"met", holds}};
        write_text(a.out, j.dump(2) + "\n");
    }
    return kOk;
}

// ---- decode ----------------------------------------------------------------

struct DecodeArgs {
    std::string codebook;
    std::string probs;
    std::string out;
};

int run_decode(const DecodeArgs& a) {
    const Codebook cb = load_valid(a.codebook);
    const auto m = load_probs(a.probs, cb);
    std::string text = header_lines(header({}));
    text += "pixel,class,distance,confidence\n";
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto d = decode(cb, m.row(i));
        text += std::to_string(i) + "," + std::to_string(d.class_index) + "," +
                format_double(d.distances[d.class_index]) + "," + format_double(pixel_confidence(m.row(i))) + "\n";
    }
    write_text(a.out, text);
    std::cout << "pixels=" << m.rows << "\n";
    return kOk;
}

// ---- label -----------------------------------------------------------------

struct LabelArgs {
    std::string codebook;
    std::string probs;
    std::string form = "hybrid";
    double T = 0.95;
    std::string format = "jsonl";
    std::string out;
};

std::string bit_string(std::span<const std::uint8_t> bits) {
    std::string s;
    for (auto b : bits) s += b ? '1' : '0';
    return s;
}

int run_label(const LabelArgs& a) {
    const Codebook cb = load_valid(a.codebook);
    const auto m = load_probs(a.probs, cb);
    const LabelForm form = label_form_from_string(a.form);
    std::string text;
    if (a.format == "csv") {
        text = header_lines(header({}));
        text += "pixel,form,bits,mask,source_class,pixel_confidence\n";
    } else {
        ojson first;
        first["meta"] = meta({});
        first["meta"]["form"] = a.form;
        first["meta"]["T"] = a.T;
        text = first.dump() + "\n";
    }
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto p = m.row(i);
        PseudoCode code = form == LabelForm::bitwise    ? bitwise_label(p)
                          : form == LabelForm::codewise ? codewise_label(cb, p)
                                                        : hybrid_label(cb, p, a.T);
        const double conf = pixel_confidence(p);
        if (a.format == "csv") {
            text += std::to_string(i) + "," + std::string(to_string(code.form)) + "," + bit_string(code.bits) + "," +
                    (code.mask ? bit_string(*code.mask) : "") + "," +
                    (code.source_class ? std::to_string(*code.source_class) : "") + "," + format_double(conf) + "\n";
        } else {
            ojson r;
            r["pixel"] = i;
            r["form"] = std::string(to_string(code.form));
            r["bits"] = bit_string(code.bits);
            r["mask"] = code.mask ? ojson(bit_string(*code.mask)) : ojson(nullptr);
            r["source_class"] = code.source_class ? ojson(*code.source_class) : ojson(nullptr);
            r["pixel_confidence"] = conf;
            text += r.dump() + "\n";
        }
    }
    write_text(a.out, text);
    std::cout << "pixels=" << m.rows << " form=" << a.form << "\n";
    return kOk;
}

// ---- simulate / compare ----------------------------------------------------

ojson diagnostics_json(const LabelDiagnostics& d) {
    ojson j;
    j["pixels"] = d.pixels;
    j["teacher_class_counts"] = d.teacher_class_counts;
    j["bit_flips"] = d.bit_flips;
    j["class_flips"] = d.class_flips;
    j["difference_count"] = d.difference_count;
    j["correction_count"] = d.correction_count;
    j["hybrid_vs_codewise"] = d.hybrid_vs_codewise;
    j["unmasked_disagreement"] = d.unmasked_disagreement;
    return j;
}

int run_simulate(const std::string& config_path, const std::string& out_dir, bool pgm) {
    const SimulationConfig cfg = load_simulation_config(config_path);
    const SyntheticTask task = make_task(cfg.task);
    const ModelKind kind = cfg.ecoc_model ? ModelKind::ecoc(build_codebook(cfg.codebook, cfg.task.n_classes))
                                          : ModelKind::onehot(cfg.task.n_classes);
    const TrainResult result = cfg.mode == RunMode::supervised ? train_supervised(kind, task, cfg.train)
                                                               : train_pseudo_label(kind, task, cfg.train);
    std::vector<std::uint64_t> seeds{cfg.task.seed, cfg.train.seed};
    if (kind.is_ecoc() && cfg.codebook.file.empty()) seeds.push_back(cfg.codebook.seed);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::string csv = header_lines(header(seeds));
    csv += "step,supervised_loss,unsupervised_loss,quality,pl_bit_error,pl_class_error\n";
    for (const auto& s : result.metrics.log)
        csv += std::to_string(s.step) + "," + format_double(s.supervised_loss) + "," +
               format_double(s.unsupervised_loss) + "," + format_double(s.quality) + "," +
               format_double(s.pl_bit_error) + "," + format_double(s.pl_class_error) + "\n";
    write_text(dir / "metrics.csv", csv);

    ojson summary;
    summary["meta"] = meta(seeds);
    summary["config"] = to_json(cfg);
    summary["model"] = kind.name();
    if (kind.is_ecoc()) {
        summary["codebook"] = stats_json(*kind.codebook);
        summary["codebook"]["rows"] = kind.codebook->row_strings();
    }
    summary["final"] = to_json(result.metrics.final);
    summary["diagnostics"] = diagnostics_json(result.metrics.diagnostics);
    write_text(dir / "summary.json", summary.dump(2) + "\n");

    if (pgm) {
        const auto& tc = cfg.task;
        write_text(dir / "truth.pgm", pgm_string(task.grid, tc.height, tc.width, tc.n_classes, header(seeds)));
        const auto pred = predict_all(kind, result.student, task);
        write_text(dir / "prediction.pgm", pgm_string(pred, tc.height, tc.width, tc.n_classes, header(seeds)));
    }
    std::cout << "model=" << kind.name() << " accuracy=" << format_double(result.metrics.final.accuracy)
              << " mean_iou=" << format_double(result.metrics.final.mean_iou) << "\n";
    return kOk;
}

int run_compare(const std::string& config_path, std::vector<std::uint64_t> seeds, const std::string& out,
                unsigned threads) {
    const SimulationConfig cfg = load_simulation_config(config_path);
    if (seeds.empty()) seeds = cfg.seeds;
    if (seeds.size() < 2) throw UsageError("compare needs at least 2 seeds (--seeds or config \"seeds\")");
    const Codebook cb = build_codebook(cfg.codebook, cfg.task.n_classes);
    const auto summary = compare_ecoc_vs_onehot(cfg.task, cfg.train, cb, seeds, threads);

    std::vector<std::uint64_t> all_seeds = seeds;
    if (cfg.codebook.file.empty()) all_seeds.push_back(cfg.codebook.seed);
    ojson j;
    j["meta"] = meta(all_seeds);
    j["config"] = to_json(cfg);
    j["codebook"] = stats_json(cb);
    j["summary"] = to_json(summary);
    write_text(out, j.dump(2) + "\n");
    std::cout << "seeds=" << seeds.size() << " ecoc_median=" << format_double(summary.ecoc_median)
              << " onehot_median=" << format_double(summary.onehot_median)
              << " median_gap=" << format_double(summary.median_gap) << " ecoc_wins=" << summary.ecoc_wins
              << " win_rate=" << format_double(summary.win_rate) << "\n";
    return kOk;
}

// ---- calibrate -------------------------------------------------------------

struct CalibArgs {
    std::string codebook;
    std::string probs;
    std::string truth;
    std::size_t bins = 10;
    std::string out;
    std::string topc_out;
};

int run_calibrate(const CalibArgs& a) {
    const Codebook cb = load_valid(a.codebook);
    const auto m = load_probs(a.probs, cb);
    const auto truth = read_class_ids(a.truth);
    if (truth.size() != m.rows)
        throw ValidationError(a.truth + ": " + std::to_string(truth.size()) + " labels for " +
                              std::to_string(m.rows) + " pixels");
    std::vector<PseudoCode> targets;
    targets.reserve(truth.size());
    for (std::size_t c : truth) {
        if (c >= cb.n_classes()) throw ValidationError(a.truth + ": class id " + std::to_string(c) + " out of range");
        const auto row = cb.row(c);
        targets.push_back({{row.begin(), row.end()}, LabelForm::codewise, std::nullopt, c});
    }
    const auto samples = bit_level_samples(m.values, cb.code_length(), targets);
    const auto bins = reliability_bins(samples, a.bins);
    const double e = ece_from_bins(bins);

    std::string csv = header_lines(header({}));
    csv += "# ece: " + format_double(e) + "\n";
    csv += "bin,lower,upper,count,mean_confidence,accuracy\n";
    for (std::size_t b = 0; b < bins.bins.size(); ++b) {
        const auto& x = bins.bins[b];
        csv += std::to_string(b) + "," + format_double(x.lower) + "," + format_double(x.upper) + "," +
               std::to_string(x.count) + "," + format_double(x.mean_confidence) + "," + format_double(x.accuracy) +
               "\n";
    }
    write_text(a.out, csv);

    if (!a.topc_out.empty()) {
        std::vector<DecodeResult> decoded;
        decoded.reserve(m.rows);
        for (std::size_t i = 0; i < m.rows; ++i) decoded.push_back(decode(cb, m.row(i)));
        const auto curve = topc_accuracy(decoded, truth, cb.n_classes());
        std::string t = header_lines(header({}));
        t += "C,accuracy\n";
        for (std::size_t c = 0; c < curve.size(); ++c) t += std::to_string(c + 1) + "," + format_double(curve[c]) + "\n";
        write_text(a.topc_out, t);
    }
    std::cout << "samples=" << samples.size() << " ece=" << format_double(e) << "\n";
    return kOk;
}

// ---- selftest --------------------------------------------------------------

int run_selftest_cmd(const SelftestOptions& opts) {
    const auto results = run_selftest(opts);
    std::string failed;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        if (!r.passed) failed += (failed.empty() ? "" : ",") + r.name;
    }
    if (!failed.empty()) throw ValidationError("selftest failed: " + failed);
    std::cout << "all " << results.size() << " suites passed\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    g_command = "ecoc";
    for (int i = 1; i < argc; ++i) g_command += std::string(" ") + argv[i];

    CLI::App app{"Error-correcting output codes for pseudo-label learning: codebooks, decoding, labels, "
                 "simulation and calibration."};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--threads", threads, "Worker threads; results do not depend on this")
        ->check(CLI::PositiveNumber);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("codebook-gen", "Generate a codebook and print its separation stats");
    gen_cmd->add_option("--strategy", gen.strategy, "mmd | text | onehot")
        ->check(CLI::IsMember({"mmd", "text", "onehot"}));
    gen_cmd->add_option("--classes", gen.classes, "Number of classes N (0: taken from --names or --embeddings)");
    gen_cmd->add_option("--names", gen.names, "File with one class name per line");
    gen_cmd->add_option("--length", gen.length, "Code length K (0: about 10 log2 N, multiple of 4)");
    gen_cmd->add_option("--iters", gen.iters, "Random-search candidates for mmd")->check(CLI::PositiveNumber);
    gen.seed_opt = gen_cmd->add_option("--seed", gen.seed, "Seed for mmd (required for mmd)");
    gen_cmd->add_option("--embeddings", gen.embeddings, "Embedding file for text: name then reals per line");
    gen_cmd->add_option("--out", gen.out, "Output codebook JSON")->required();

    std::string validate_path;
    auto* val_cmd = app.add_subcommand("codebook-validate", "Check a codebook file; exit 2 on any violation");
    val_cmd->add_option("--codebook", validate_path, "Codebook JSON")->required();

    StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("codebook-stats", "Separation stats and the minimum-distance condition");
    stats_cmd->add_option("--codebook", stats.codebook, "Codebook JSON")->required();
    stats_cmd->add_option("--out", stats.out, "Optional JSON report");
    stats_cmd->add_option("--eps", stats.eps, "Label noise rate")->check(CLI::Range(0.0, 1.0));
    stats_cmd->add_option("--gamma", stats.gamma, "Margin gamma")->check(CLI::PositiveNumber);
    stats_cmd->add_option("--gamma-hat", stats.gamma_hat, "Margin gamma_hat")->check(CLI::NonNegativeNumber);
    stats_cmd->add_option("--kappa", stats.kappa, "Bound kappa")->check(CLI::NonNegativeNumber);

    DecodeArgs dec;
    auto* dec_cmd = app.add_subcommand("decode", "Nearest-codeword decoding of a P x K probability matrix");
    dec_cmd->add_option("--codebook", dec.codebook, "Codebook JSON")->required();
    dec_cmd->add_option("--probs", dec.probs, "Probabilities: .csv or binary blob")->required();
    dec_cmd->add_option("--out", dec.out, "Output CSV")->required();

    LabelArgs lab;
    auto* lab_cmd = app.add_subcommand("label", "Build pseudo-labels from probabilities");
    lab_cmd->add_option("--codebook", lab.codebook, "Codebook JSON")->required();
    lab_cmd->add_option("--probs", lab.probs, "Probabilities: .csv or binary blob")->required();
    lab_cmd->add_option("--form", lab.form, "bitwise | codewise | hybrid")
        ->check(CLI::IsMember({"bitwise", "codewise", "hybrid"}));
    lab_cmd->add_option("--T", lab.T, "Reliable-bit confidence threshold")->check(CLI::Range(0.5, 1.0));
    lab_cmd->add_option("--format", lab.format, "csv | jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    lab_cmd->add_option("--out", lab.out, "Output file")->required();

    std::string sim_config, sim_out;
    bool sim_pgm = true;
    auto* sim_cmd = app.add_subcommand("simulate", "Train one model on a synthetic task");
    sim_cmd->add_option("--config", sim_config, "Run config JSON")->required();
    sim_cmd->add_option("--out", sim_out, "Output directory")->required();
    sim_cmd->add_flag("--pgm,!--no-pgm", sim_pgm, "Write truth.pgm and prediction.pgm");

    std::string cmp_config, cmp_out;
    std::vector<std::uint64_t> cmp_seeds;
    auto* cmp_cmd = app.add_subcommand("compare", "Paired ECOC vs one-hot runs over several seeds");
    cmp_cmd->add_option("--config", cmp_config, "Run config JSON")->required();
    cmp_cmd->add_option("--seeds", cmp_seeds, "Comma-separated seeds (overrides the config)")->delimiter(',');
    cmp_cmd->add_option("--out", cmp_out, "Output summary JSON")->required();

    CalibArgs cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "Bit-level reliability bins, ECE and Top-C accuracy");
    cal_cmd->add_option("--codebook", cal.codebook, "Codebook JSON")->required();
    cal_cmd->add_option("--probs", cal.probs, "Probabilities: .csv or binary blob")->required();
    cal_cmd->add_option("--truth", cal.truth, "One true class id per pixel")->required();
    cal_cmd->add_option("--bins", cal.bins, "Number of reliability bins")->check(CLI::PositiveNumber);
    cal_cmd->add_option("--out", cal.out, "Reliability bins CSV")->required();
    cal_cmd->add_option("--topc-out", cal.topc_out, "Optional Top-C accuracy CSV");

    SelftestOptions st;
    auto* st_cmd = app.add_subcommand("selftest", "Gradient, loss identity, error-correction and noise-model checks");
    st_cmd->add_option("--seed", st.seed, "Seed for all randomized suites");
    st_cmd->add_flag("--inject-gradient-bug", st.inject_gradient_bug, "Perturb analytic gradients (must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ecoc: error[usage]: " << one_line(e.what()) << "\n";
        return kUsage;
    }

    try {
        if (*gen_cmd) return run_codebook_gen(gen, threads);
        if (*val_cmd) return run_codebook_validate(validate_path);
        if (*stats_cmd) return run_codebook_stats(stats);
        if (*dec_cmd) return run_decode(dec);
        if (*lab_cmd) return run_label(lab);
        if (*sim_cmd) return run_simulate(sim_config, sim_out, sim_pgm);
        if (*cmp_cmd) return run_compare(cmp_config, cmp_seeds, cmp_out, threads);
        if (*cal_cmd) return run_calibrate(cal);
        if (*st_cmd) return run_selftest_cmd(st);
    } catch (const UsageError& e) {
        std::cerr << "ecoc: error[usage]: " << one_line(e.what()) << "\n";
        return kUsage;
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        for (const auto& p : e.problems())
            if (msg.find(p) == std::string::npos) msg += "; " + p;
        std::cerr << "ecoc: error[validation]: " << one_line(msg) << "\n";
        return kValidation;
    } catch (const NumericError& e) {
        std::cerr << "ecoc: error[numeric]: " << one_line(e.what()) << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "ecoc: error[validation]: " << one_line(e.what()) << "\n";
        return kValidation;
    }
    return kUsage;
}
