#include "ecoc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "ecoc/decoding.hpp"
#include "ecoc/error.hpp"

namespace ecoc {

namespace {

// Substream ids under a task or training seed.
enum : std::uint64_t {
    kStreamInit = 1,
    kStreamSupervised = 2,
    kStreamUnlabeled = 3,
    kStreamNoise = 4,
    kStreamSites = 101,
    kStreamMeans = 102,
    kStreamFeatures = 103,
    kStreamSplits = 104,
};

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

std::string to_string(NoiseMode m) { return m == NoiseMode::none ? "none" : "teacher_flip"; }
std::string to_string(QualityMode m) { return m == QualityMode::image_weight ? "image_weight" : "threshold"; }

SyntheticTask make_task(const TaskConfig& cfg) {
    require(cfg.n_classes >= 2, "make_task: n_classes must be >= 2");
    require(cfg.feature_dim >= 2, "make_task: feature_dim must be >= 2");
    require(cfg.height >= 1 && cfg.width >= 1, "make_task: grid must be non-empty");
    const std::size_t P = cfg.height * cfg.width;
    require(P >= cfg.n_classes, "make_task: grid has fewer pixels than classes");
    require(cfg.labeled_fraction > 0.0 && cfg.labeled_fraction < 1.0, "make_task: labeled_fraction must lie in (0, 1)");
    require(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0, "make_task: test_fraction must lie in (0, 1)");
    require(cfg.separation > 0.0, "make_task: separation must be positive");
    require(cfg.noise_scale > 0.0, "make_task: noise_scale must be positive");

    const std::size_t n_labeled = static_cast<std::size_t>(std::llround(cfg.labeled_fraction * static_cast<double>(P)));
    const std::size_t n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(P)));
    require(n_labeled >= 1 && n_test >= 1 && n_labeled + n_test < P,
            "make_task: labeled and test splits must be non-empty and leave unlabeled pixels");

    SyntheticTask t;
    t.config = cfg;
    const std::size_t N = cfg.n_classes, D = cfg.feature_dim;

    // Distinct Voronoi sites; each site pixel is its own nearest site, so every
    // class appears in the grid.
    std::vector<std::size_t> perm(P);
    std::iota(perm.begin(), perm.end(), 0);
    {
        Rng rng(cfg.seed, kStreamSites);
        for (std::size_t i = 0; i < N; ++i) std::swap(perm[i], perm[i + rng.index(P - i)]);
    }
    t.grid.resize(P);
    for (std::size_t p = 0; p < P; ++p) {
        const double r = static_cast<double>(p / cfg.width), c = static_cast<double>(p % cfg.width);
        double best = INFINITY;
        for (std::size_t n = 0; n < N; ++n) {
            const double sr = static_cast<double>(perm[n] / cfg.width), sc = static_cast<double>(perm[n] % cfg.width);
            const double d = (r - sr) * (r - sr) + (c - sc) * (c - sc);
            if (d < best) {
                best = d;
                t.grid[p] = n;
            }
        }
    }

    t.class_means.resize(N * D);
    {
        Rng rng(cfg.seed, kStreamMeans);
        const double scale = cfg.separation / std::sqrt(static_cast<double>(D));
        for (auto& m : t.class_means) m = scale * rng.normal();
    }

    t.features.resize(P * D);
    {
        Rng rng(cfg.seed, kStreamFeatures);
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t d = 0; d < D; ++d)
                t.features[p * D + d] = t.class_means[t.grid[p] * D + d] + cfg.noise_scale * rng.normal();
    }

    std::iota(perm.begin(), perm.end(), 0);
    {
        Rng rng(cfg.seed, kStreamSplits);
        for (std::size_t i = P - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    }
    t.labeled.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_labeled));
    t.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_labeled),
                  perm.begin() + static_cast<std::ptrdiff_t>(n_labeled + n_test));
    t.unlabeled.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_labeled + n_test), perm.end());
    std::sort(t.labeled.begin(), t.labeled.end());
    std::sort(t.test.begin(), t.test.end());
    std::sort(t.unlabeled.begin(), t.unlabeled.end());
    return t;
}

void LinearModel::forward(std::span<const double> z, std::span<double> out) const {
    for (std::size_t o = 0; o < outputs; ++o) {
        double s = biases[o];
        const double* w = weights.data() + o * dim;
        for (std::size_t d = 0; d < dim; ++d) s += w[d] * z[d];
        out[o] = s;
    }
}

ModelKind ModelKind::ecoc(Codebook cb) {
    ModelKind k;
    k.classes = cb.n_classes();
    k.codebook = std::move(cb);
    return k;
}

ModelKind ModelKind::onehot(std::size_t n_classes) {
    ModelKind k;
    k.classes = n_classes;
    return k;
}

std::size_t predict(const ModelKind& kind, const LinearModel& model, std::span<const double> z) {
    std::vector<double> out(model.outputs);
    model.forward(z, out);
    if (kind.is_ecoc()) return decode(*kind.codebook, sigmoid(out)).class_index;
    return static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
}

std::vector<std::size_t> predict_all(const ModelKind& kind, const LinearModel& model, const SyntheticTask& task) {
    std::vector<std::size_t> out(task.pixels());
    for (std::size_t p = 0; p < task.pixels(); ++p) out[p] = predict(kind, model, task.feature(p));
    return out;
}

EvalResult evaluate_predictions(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                                std::size_t n_classes) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("evaluate: misaligned predictions");
    if (truth.empty()) throw std::invalid_argument("evaluate: no pixels");
    const std::size_t N = n_classes;
    EvalResult r;
    r.confusion.assign(N * N, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= N || predicted[i] >= N) throw std::invalid_argument("evaluate: class id out of range");
        ++r.confusion[truth[i] * N + predicted[i]];
        correct += truth[i] == predicted[i];
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    r.per_class_accuracy.assign(N, 0.0);
    r.per_class_iou.assign(N, 0.0);
    double iou_sum = 0.0;
    std::size_t iou_classes = 0;
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t row = 0, col = 0;
        for (std::size_t j = 0; j < N; ++j) {
            row += r.confusion[c * N + j];
            col += r.confusion[j * N + c];
        }
        const std::size_t tp = r.confusion[c * N + c];
        if (row) r.per_class_accuracy[c] = static_cast<double>(tp) / static_cast<double>(row);
        const std::size_t denom = row + col - tp;
        if (denom) {
            r.per_class_iou[c] = static_cast<double>(tp) / static_cast<double>(denom);
            iou_sum += r.per_class_iou[c];
            ++iou_classes;
        }
    }
    r.mean_iou = iou_classes ? iou_sum / static_cast<double>(iou_classes) : 0.0;
    return r;
}

EvalResult evaluate(const ModelKind& kind, const LinearModel& model, const SyntheticTask& task,
                    std::span<const std::size_t> pixels) {
    std::vector<std::size_t> pred(pixels.size()), truth(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pred[i] = predict(kind, model, task.feature(pixels[i]));
        truth[i] = task.grid[pixels[i]];
    }
    return evaluate_predictions(pred, truth, task.n_classes());
}

std::size_t flip_label(std::size_t label, std::size_t n_classes, double eps, Rng& rng) {
    if (!(rng.uniform() < eps)) return label;
    const auto r = static_cast<std::size_t>(rng.index(n_classes - 1));
    return r >= label ? r + 1 : r;
}

std::vector<std::size_t> inject_uniform_label_noise(std::span<const std::size_t> labels, std::size_t n_classes,
                                                    double eps, std::uint64_t seed) {
    require(n_classes >= 2, "inject_uniform_label_noise: need at least 2 classes");
    require(eps >= 0.0 && eps < 1.0, "inject_uniform_label_noise: eps must lie in [0, 1)");
    Rng rng(seed);
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] < n_classes, "inject_uniform_label_noise: label out of range");
        out[i] = flip_label(labels[i], n_classes, eps, rng);
    }
    return out;
}

BitNoise exact_bit_noise(const Codebook& cb, std::span<const double> prior, double eps) {
    const std::size_t N = cb.n_classes(), K = cb.code_length();
    require(prior.size() == N, "exact_bit_noise: prior size must equal n_classes");
    double total = 0.0;
    for (double p : prior) {
        require(p >= 0.0, "exact_bit_noise: negative prior");
        total += p;
    }
    require(std::abs(total - 1.0) < 1e-9, "exact_bit_noise: prior must sum to 1");
    require(eps >= 0.0 && eps < 1.0, "exact_bit_noise: eps must lie in [0, 1)");

    BitNoise out;
    out.per_bit.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        double acc = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            std::size_t differ = 0;
            for (std::size_t c2 = 0; c2 < N; ++c2) differ += c2 != c && cb.bit(c2, k) != cb.bit(c, k);
            acc += prior[c] * static_cast<double>(differ) / static_cast<double>(N - 1);
        }
        out.per_bit[k] = eps * acc;
    }
    const double d = static_cast<double>(separation_stats(cb).d_min_row);
    out.surrogate = eps * (static_cast<double>(K) + d) / (2.0 * static_cast<double>(K));
    return out;
}

std::vector<double> corrupt_probabilities(std::span<const double> probs, std::span<const std::uint8_t> corrupted,
                                          double blend) {
    require(probs.size() == corrupted.size(), "corrupt_probabilities: length mismatch");
    std::vector<double> out(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k)
        out[k] = (1.0 - blend) * probs[k] + blend * static_cast<double>(corrupted[k]);
    return out;
}

LinearModel init_model(const ModelKind& kind, std::size_t dim, const TrainConfig& cfg) {
    LinearModel m(kind.outputs(), dim);
    Rng rng(cfg.seed, kStreamInit);
    for (auto& w : m.weights) w = cfg.init_scale * rng.normal();
    return m;
}

namespace {

void check_config(const ModelKind& kind, const SyntheticTask& task, const TrainConfig& cfg) {
    require(kind.n_classes() == task.n_classes(), "train: model and task disagree on n_classes");
    require(kind.outputs() >= 1, "train: model has no outputs");
    require(cfg.learning_rate > 0.0, "train: learning_rate must be positive");
    require(cfg.batch_pixels >= 1, "train: batch_pixels must be >= 1");
    require(cfg.ema_coeff > 0.0 && cfg.ema_coeff < 1.0, "train: ema_coeff must lie in (0, 1)");
    require(cfg.lambda_u >= 0.0, "train: lambda_u must be >= 0");
    require(cfg.T >= 0.5 && cfg.T <= 1.0, "train: T must lie in [0.5, 1]");
    require(cfg.tau_prime >= 0.0 && cfg.tau_prime <= 1.0, "train: tau_prime must lie in [0, 1]");
    require(cfg.noise_eps >= 0.0 && cfg.noise_eps < 1.0, "train: noise_eps must lie in [0, 1)");
    require(cfg.noise_blend >= 0.0 && cfg.noise_blend <= 1.0, "train: noise_blend must lie in [0, 1]");
    require(cfg.loss.lambda1 >= 0.0 && cfg.loss.lambda2 >= 0.0, "train: loss weights must be >= 0");
    require(cfg.loss.tau > 0.0, "train: loss tau must be positive");
    require(cfg.log_every >= 1, "train: log_every must be >= 1");
}

std::size_t nearest_codeword(const Codebook& cb, std::span<const std::uint8_t> bits) {
    std::size_t best = 0, best_d = cb.code_length() + 1;
    for (std::size_t n = 0; n < cb.n_classes(); ++n) {
        const auto d = hamming(cb.row(n), bits);
        if (d < best_d) {
            best_d = d;
            best = n;
        }
    }
    return best;
}

class Trainer {
public:
    Trainer(const ModelKind& kind, const SyntheticTask& task, const TrainConfig& cfg)
        : kind_(kind), task_(task), cfg_(cfg),
          student_(init_model(kind, task.dim(), cfg)), teacher_(student_),
          sup_rng_(cfg.seed, kStreamSupervised), unl_rng_(cfg.seed, kStreamUnlabeled),
          noise_rng_(cfg.seed, kStreamNoise), grad_w_(student_.weights.size()), grad_b_(student_.biases.size()),
          out_(kind.outputs()), teacher_out_(kind.outputs()) {
        check_config(kind, task, cfg);
        diag_.teacher_class_counts.assign(kind.n_classes(), 0);
        diag_.bit_flips.assign(kind.outputs(), 0);
    }

    TrainResult run(bool pseudo, const StepObserver& observer) {
        Window window;
        for (std::size_t step = 1; step <= cfg_.steps; ++step) {
            std::fill(grad_w_.begin(), grad_w_.end(), 0.0);
            std::fill(grad_b_.begin(), grad_b_.end(), 0.0);

            const double sup = supervised_batch();
            window.sup += sup;
            if (pseudo && cfg_.lambda_u > 0.0) {
                const auto u = unlabeled_batch();
                window.unsup += u.loss;
                window.quality += u.quality;
                window.bit_error += u.bit_error;
                window.class_error += u.class_error;
            }
            ++window.steps;

            for (std::size_t i = 0; i < grad_w_.size(); ++i) student_.weights[i] -= cfg_.learning_rate * grad_w_[i];
            for (std::size_t i = 0; i < grad_b_.size(); ++i) student_.biases[i] -= cfg_.learning_rate * grad_b_[i];
            for (double w : student_.weights)
                if (!std::isfinite(w)) throw NumericError("training diverged: non-finite weight at step " + std::to_string(step));
            for (double b : student_.biases)
                if (!std::isfinite(b)) throw NumericError("training diverged: non-finite bias at step " + std::to_string(step));

            const double a = cfg_.ema_coeff;
            for (std::size_t i = 0; i < teacher_.weights.size(); ++i)
                teacher_.weights[i] = a * teacher_.weights[i] + (1.0 - a) * student_.weights[i];
            for (std::size_t i = 0; i < teacher_.biases.size(); ++i)
                teacher_.biases[i] = a * teacher_.biases[i] + (1.0 - a) * student_.biases[i];

            if (observer) observer(step, student_, teacher_);
            if (step % cfg_.log_every == 0 || step == cfg_.steps) {
                const double n = static_cast<double>(window.steps);
                log_.push_back({step, window.sup / n, window.unsup / n, window.quality / n, window.bit_error / n,
                                window.class_error / n});
                window = {};
            }
        }
        TrainResult r;
        r.metrics.final = evaluate(kind_, student_, task_, task_.test);
        r.metrics.log = std::move(log_);
        r.metrics.diagnostics = std::move(diag_);
        r.student = std::move(student_);
        r.teacher = std::move(teacher_);
        return r;
    }

private:
    struct Window {
        std::size_t steps = 0;
        double sup = 0.0, unsup = 0.0, quality = 0.0, bit_error = 0.0, class_error = 0.0;
    };
    struct UnlabeledStats {
        double loss = 0.0, quality = 0.0, bit_error = 0.0, class_error = 0.0;
    };

    // grad += scale * dloss/dlogits (x) [z, 1]
    void accumulate(std::span<const double> z, std::span<const double> g, double scale) {
        const std::size_t D = student_.dim;
        for (std::size_t o = 0; o < g.size(); ++o) {
            const double go = scale * g[o];
            double* gw = grad_w_.data() + o * D;
            for (std::size_t d = 0; d < D; ++d) gw[d] += go * z[d];
            grad_b_[o] += go;
        }
    }

    void check_finite(double v, const char* what) const {
        if (!std::isfinite(v)) throw NumericError(std::string("training diverged: non-finite ") + what + " loss");
    }

    double supervised_batch() {
        const std::size_t B = cfg_.batch_pixels;
        const double scale = 1.0 / static_cast<double>(B);
        double total = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
            const std::size_t p = task_.labeled[sup_rng_.index(task_.labeled.size())];
            const auto z = task_.feature(p);
            const std::size_t y = task_.grid[p];
            student_.forward(z, out_);
            const LossValue l =
                kind_.is_ecoc() ? total_loss(out_, kind_.codebook->row(y), *kind_.codebook, cfg_.loss) : ce_loss(out_, y);
            check_finite(l.value, "supervised");
            total += l.value;
            accumulate(z, l.gradient, scale);
        }
        return total * scale;
    }

    struct Pending {
        std::size_t pixel;
        std::vector<std::uint8_t> bits;  // ECOC target
        std::size_t target_class;        // one-hot target / decoded target class
        double confidence;
    };

    UnlabeledStats unlabeled_batch() {
        const std::size_t B = cfg_.batch_pixels;
        const std::size_t N = kind_.n_classes();
        const bool noisy = cfg_.noise_mode == NoiseMode::teacher_flip && cfg_.noise_eps > 0.0;
        std::vector<Pending> batch;
        batch.reserve(B);
        UnlabeledStats st;

        for (std::size_t b = 0; b < B; ++b) {
            const std::size_t p = task_.unlabeled[unl_rng_.index(task_.unlabeled.size())];
            const std::size_t truth = task_.grid[p];
            teacher_.forward(task_.feature(p), teacher_out_);
            Pending item{p, {}, 0, 0.0};

            if (kind_.is_ecoc()) {
                const Codebook& cb = *kind_.codebook;
                const auto probs = sigmoid(teacher_out_);
                const std::size_t clean = decode(cb, probs).class_index;
                const std::size_t label = noisy ? flip_label(clean, N, cfg_.noise_eps, noise_rng_) : clean;
                item.confidence = pixel_confidence(probs);

                const auto used = label == clean ? probs : corrupt_probabilities(probs, cb.row(label), cfg_.noise_blend);
                PseudoCode code;
                code.form = LabelForm::codewise;
                code.bits.assign(cb.row(label).begin(), cb.row(label).end());
                code.source_class = label;
                const PseudoCode bit = bitwise_label(used);
                const BitMask mask = mine_reliable_bits(cb, used, cfg_.T);
                const PseudoCode hyb = fuse_hybrid(code, bit, mask);

                ++diag_.pixels;
                ++diag_.teacher_class_counts[clean];
                diag_.class_flips += label != clean;
                for (std::size_t k = 0; k < cb.code_length(); ++k) {
                    diag_.bit_flips[k] += code.bits[k] != cb.bit(clean, k);
                    if (bit.bits[k] != code.bits[k]) {
                        ++diag_.difference_count;
                        if (mask[k]) ++diag_.correction_count;
                        else ++diag_.unmasked_disagreement;
                    }
                    diag_.hybrid_vs_codewise += hyb.bits[k] != code.bits[k];
                }

                switch (cfg_.label_form) {
                    case LabelForm::bitwise: item.bits = bit.bits; break;
                    case LabelForm::codewise: item.bits = code.bits; break;
                    case LabelForm::hybrid: item.bits = hyb.bits; break;
                }
                item.target_class = nearest_codeword(cb, item.bits);
                st.bit_error += static_cast<double>(hamming(item.bits, cb.row(truth))) /
                                static_cast<double>(cb.code_length());
            } else {
                const auto probs = softmax(teacher_out_);
                const std::size_t clean =
                    static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
                const std::size_t label = noisy ? flip_label(clean, N, cfg_.noise_eps, noise_rng_) : clean;
                item.confidence = probs[clean];
                item.target_class = label;
                ++diag_.pixels;
                ++diag_.teacher_class_counts[clean];
                diag_.class_flips += label != clean;
                if (label != clean) {
                    ++diag_.bit_flips[label];
                    ++diag_.bit_flips[clean];
                }
                st.bit_error += label == truth ? 0.0 : 2.0 / static_cast<double>(N);
            }
            st.class_error += item.target_class != truth;
            batch.push_back(std::move(item));
        }

        std::vector<double> weights(B);
        if (cfg_.quality_mode == QualityMode::image_weight) {
            std::vector<double> conf(B);
            for (std::size_t b = 0; b < B; ++b) conf[b] = batch[b].confidence;
            std::fill(weights.begin(), weights.end(), image_quality_weight(conf, cfg_.tau_prime));
        } else {
            for (std::size_t b = 0; b < B; ++b) weights[b] = threshold_filter(batch[b].confidence, cfg_.tau_prime);
        }

        const double scale = 1.0 / static_cast<double>(B);
        for (std::size_t b = 0; b < B; ++b) {
            const auto z = task_.feature(batch[b].pixel);
            st.quality += weights[b];
            if (weights[b] == 0.0) continue;
            student_.forward(z, out_);
            const LossValue l = kind_.is_ecoc() ? total_loss(out_, batch[b].bits, *kind_.codebook, cfg_.loss)
                                                : ce_loss(out_, batch[b].target_class);
            check_finite(l.value, "unsupervised");
            st.loss += weights[b] * l.value;
            accumulate(z, l.gradient, cfg_.lambda_u * weights[b] * scale);
        }
        st.loss *= scale;
        st.quality *= scale;
        st.bit_error *= scale;
        st.class_error *= scale;
        return st;
    }

    const ModelKind& kind_;
    const SyntheticTask& task_;
    const TrainConfig& cfg_;
    LinearModel student_, teacher_;
    Rng sup_rng_, unl_rng_, noise_rng_;
    std::vector<double> grad_w_, grad_b_;
    std::vector<double> out_, teacher_out_;
    std::vector<StepLog> log_;
    LabelDiagnostics diag_;
};

}  // namespace

TrainResult train_supervised(const ModelKind& kind, const SyntheticTask& task, const TrainConfig& cfg,
                             const StepObserver& observer) {
    return Trainer(kind, task, cfg).run(false, observer);
}

TrainResult train_pseudo_label(const ModelKind& kind, const SyntheticTask& task, const TrainConfig& cfg,
                               const StepObserver& observer) {
    return Trainer(kind, task, cfg).run(true, observer);
}

Codebook build_codebook(const CodebookSpec& spec, std::size_t n_classes) {
    if (!spec.file.empty()) {
        auto loaded = load(spec.file);
        if (!loaded.report.ok())
            throw ValidationError("codebook file " + spec.file + " is invalid", loaded.report.violations);
        if (loaded.codebook.n_classes() != n_classes)
            throw ValidationError("codebook file " + spec.file + " has " +
                                  std::to_string(loaded.codebook.n_classes()) + " classes, task has " +
                                  std::to_string(n_classes));
        return std::move(loaded.codebook);
    }
    switch (spec.strategy) {
        case Strategy::mmd: return generate_mmd({n_classes, spec.code_length, spec.iterations, spec.seed, 1});
        case Strategy::onehot: return one_hot(n_classes);
        default: throw ValidationError("codebook strategy '" + std::string(to_string(spec.strategy)) +
                                       "' needs a codebook file");
    }
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CompareSummary compare_ecoc_vs_onehot(const TaskConfig& task_cfg, const TrainConfig& train_cfg, const Codebook& cb,
                                      std::span<const std::uint64_t> seeds, unsigned threads) {
    require(seeds.size() >= 2, "compare_ecoc_vs_onehot: need at least 2 seeds");
    require(cb.n_classes() == task_cfg.n_classes, "compare_ecoc_vs_onehot: codebook and task disagree on n_classes");
    const ModelKind ecoc_kind = ModelKind::ecoc(cb);
    const ModelKind onehot_kind = ModelKind::onehot(task_cfg.n_classes);

    // Jobs per seed: ecoc pseudo, onehot pseudo, ecoc supervised, onehot supervised.
    constexpr std::size_t kJobs = 4;
    std::vector<SyntheticTask> tasks(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        TaskConfig tc = task_cfg;
        tc.seed = seeds[i];
        tasks[i] = make_task(tc);
    }
    std::vector<EvalResult> results(seeds.size() * kJobs);
    std::vector<std::exception_ptr> errors(results.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < results.size(); j = next++) {
            try {
                const std::size_t s = j / kJobs, which = j % kJobs;
                TrainConfig tc = train_cfg;
                tc.seed = seeds[s];
                const ModelKind& kind = (which % 2 == 0) ? ecoc_kind : onehot_kind;
                results[j] = which < 2 ? train_pseudo_label(kind, tasks[s], tc).metrics.final
                                       : train_supervised(kind, tasks[s], tc).metrics.final;
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(results.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    CompareSummary out;
    std::vector<double> ecoc, onehot, gaps;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        SeedOutcome o;
        o.seed = seeds[s];
        o.ecoc_accuracy = results[s * kJobs + 0].accuracy;
        o.onehot_accuracy = results[s * kJobs + 1].accuracy;
        o.supervised_ecoc_accuracy = results[s * kJobs + 2].accuracy;
        o.supervised_onehot_accuracy = results[s * kJobs + 3].accuracy;
        o.ecoc_miou = results[s * kJobs + 0].mean_iou;
        o.onehot_miou = results[s * kJobs + 1].mean_iou;
        ecoc.push_back(o.ecoc_accuracy);
        onehot.push_back(o.onehot_accuracy);
        gaps.push_back(o.ecoc_accuracy - o.onehot_accuracy);
        out.ecoc_wins += o.ecoc_accuracy > o.onehot_accuracy;
        out.runs.push_back(o);
    }
    out.ecoc_median = median(ecoc);
    out.onehot_median = median(onehot);
    out.median_gap = median(gaps);
    out.win_rate = static_cast<double>(out.ecoc_wins) / static_cast<double>(seeds.size());
    return out;
}

}  // namespace ecoc
