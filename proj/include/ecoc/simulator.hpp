#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecoc/codebook.hpp"
#include "ecoc/losses.hpp"
#include "ecoc/pseudolabel.hpp"
#include "ecoc/random.hpp"

namespace ecoc {

struct TaskConfig {
    std::size_t n_classes = 8;
    std::size_t feature_dim = 8;
    std::size_t height = 64;
    std::size_t width = 64;
    double labeled_fraction = 1.0 / 16.0;
    double test_fraction = 0.25;
    double separation = 3.0;   // typical norm of a class mean
    double noise_scale = 1.0;  // isotropic feature noise
    std::uint64_t seed = 0;
};

// Voronoi segmentation of an H x W grid with one Gaussian blob per class.
// Pixel indices are row-major; labeled, unlabeled and test are disjoint.
struct SyntheticTask {
    TaskConfig config;
    std::vector<std::size_t> grid;          // class id per pixel
    std::vector<double> class_means;        // N x D
    std::vector<double> features;           // P x D
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled;
    std::vector<std::size_t> test;

    std::size_t n_classes() const { return config.n_classes; }
    std::size_t dim() const { return config.feature_dim; }
    std::size_t pixels() const { return grid.size(); }
    std::span<const double> feature(std::size_t pixel) const {
        return {features.data() + pixel * config.feature_dim, config.feature_dim};
    }
};

SyntheticTask make_task(const TaskConfig& cfg);

// Affine map from pixel features to K bit logits (ECOC) or N class scores
// (one-hot). Weights are row-major outputs x dim.
struct LinearModel {
    std::size_t outputs = 0;
    std::size_t dim = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    LinearModel() = default;
    LinearModel(std::size_t outputs_, std::size_t dim_)
        : outputs(outputs_), dim(dim_), weights(outputs_ * dim_, 0.0), biases(outputs_, 0.0) {}

    void forward(std::span<const double> z, std::span<double> out) const;
    bool operator==(const LinearModel&) const = default;
};

// Output head: an ECOC codebook or the one-hot softmax baseline.
struct ModelKind {
    std::optional<Codebook> codebook;
    std::size_t classes = 0;

    static ModelKind ecoc(Codebook cb);
    static ModelKind onehot(std::size_t n_classes);

    bool is_ecoc() const { return codebook.has_value(); }
    std::size_t n_classes() const { return classes; }
    std::size_t outputs() const { return codebook ? codebook->code_length() : classes; }
    std::string name() const { return is_ecoc() ? "ecoc" : "onehot"; }
};

enum class NoiseMode { none, teacher_flip };
enum class QualityMode { image_weight, threshold };

std::string to_string(NoiseMode m);
std::string to_string(QualityMode m);

struct TrainConfig {
    double learning_rate = 0.1;
    std::size_t steps = 3000;
    std::size_t batch_pixels = 64;
    double ema_coeff = 0.999;
    double lambda_u = 1.0;
    LossConfig loss;
    double T = 0.95;
    double tau_prime = 0.95;
    double noise_eps = 0.0;
    NoiseMode noise_mode = NoiseMode::none;
    QualityMode quality_mode = QualityMode::image_weight;
    LabelForm label_form = LabelForm::hybrid;
    double noise_blend = 0.5;  // pull of flipped teacher probabilities toward the corrupted codeword
    double init_scale = 0.01;
    std::size_t log_every = 100;
    std::uint64_t seed = 0;
};

struct StepLog {
    std::size_t step = 0;
    double supervised_loss = 0.0;
    double unsupervised_loss = 0.0;
    double quality = 0.0;           // mean quality weight over the unlabeled batch
    double pl_bit_error = 0.0;      // pseudo-label bits vs ground-truth codeword
    double pl_class_error = 0.0;    // pseudo-label class vs ground truth
};

struct EvalResult {
    double accuracy = 0.0;
    std::vector<double> per_class_accuracy;
    std::vector<double> per_class_iou;
    double mean_iou = 0.0;
    std::vector<std::size_t> confusion;  // N x N, row = truth, column = prediction
};

// Counters accumulated over every unlabeled pixel seen in training.
struct LabelDiagnostics {
    std::size_t pixels = 0;
    std::vector<std::size_t> teacher_class_counts;  // decoded (clean) teacher class
    std::vector<std::size_t> bit_flips;             // code-wise bits that differ from the clean class's codeword
    std::size_t class_flips = 0;
    // bits where bit-wise and code-wise labels disagree
    std::size_t difference_count = 0;
    // of those, bits on mask = 1 (the hybrid takes the code-wise bit)
    std::size_t correction_count = 0;
    // bits where the hybrid differs from the code-wise label
    std::size_t hybrid_vs_codewise = 0;
    // mask = 0 positions where bit-wise and code-wise disagree
    std::size_t unmasked_disagreement = 0;
};

struct RunMetrics {
    std::vector<StepLog> log;
    EvalResult final;
    LabelDiagnostics diagnostics;
};

struct TrainResult {
    LinearModel student;
    LinearModel teacher;
    RunMetrics metrics;
};

// Called after every optimizer step (1-based step index).
using StepObserver = std::function<void(std::size_t step, const LinearModel& student, const LinearModel& teacher)>;

LinearModel init_model(const ModelKind& kind, std::size_t dim, const TrainConfig& cfg);

TrainResult train_supervised(const ModelKind& kind, const SyntheticTask& task, const TrainConfig& cfg,
                             const StepObserver& observer = {});
TrainResult train_pseudo_label(const ModelKind& kind, const SyntheticTask& task, const TrainConfig& cfg,
                               const StepObserver& observer = {});

std::size_t predict(const ModelKind& kind, const LinearModel& model, std::span<const double> z);
std::vector<std::size_t> predict_all(const ModelKind& kind, const LinearModel& model, const SyntheticTask& task);

EvalResult evaluate_predictions(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                                std::size_t n_classes);
EvalResult evaluate(const ModelKind& kind, const LinearModel& model, const SyntheticTask& task,
                    std::span<const std::size_t> pixels);

// Each label is replaced with probability eps by a uniform draw over the
// other N - 1 classes.
std::vector<std::size_t> inject_uniform_label_noise(std::span<const std::size_t> labels, std::size_t n_classes,
                                                    double eps, std::uint64_t seed);
std::size_t flip_label(std::size_t label, std::size_t n_classes, double eps, Rng& rng);

struct BitNoise {
    std::vector<double> per_bit;  // exact expectation under uniform class flips
    double surrogate = 0.0;       // eps (K + d_min_row) / (2K)
};

BitNoise exact_bit_noise(const Codebook& cb, std::span<const double> class_prior, double eps);

// Probabilities used for the bit-wise label when the teacher's class was
// flipped: (1 - blend) p + blend c_corrupted.
std::vector<double> corrupt_probabilities(std::span<const double> probs, std::span<const std::uint8_t> corrupted,
                                          double blend);

struct CodebookSpec {
    Strategy strategy = Strategy::mmd;
    std::size_t code_length = 32;
    std::uint64_t iterations = 10000;
    std::uint64_t seed = 0;
    std::string file;  // loads a codebook file instead when set
};

Codebook build_codebook(const CodebookSpec& spec, std::size_t n_classes);

struct SeedOutcome {
    std::uint64_t seed = 0;
    double ecoc_accuracy = 0.0;
    double onehot_accuracy = 0.0;
    double supervised_ecoc_accuracy = 0.0;
    double supervised_onehot_accuracy = 0.0;
    double ecoc_miou = 0.0;
    double onehot_miou = 0.0;
};

struct CompareSummary {
    std::vector<SeedOutcome> runs;
    double ecoc_median = 0.0;
    double onehot_median = 0.0;
    double median_gap = 0.0;  // median of per-seed (ecoc - onehot)
    std::size_t ecoc_wins = 0;  // strict
    double win_rate = 0.0;
};

// Paired runs: seed s drives both the task and training of both paths.
CompareSummary compare_ecoc_vs_onehot(const TaskConfig& task, const TrainConfig& train, const Codebook& cb,
                                      std::span<const std::uint64_t> seeds, unsigned threads = 1);

double median(std::vector<double> values);

}  // namespace ecoc
