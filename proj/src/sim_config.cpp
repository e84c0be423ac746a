#include "ecoc/sim_config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ecoc/error.hpp"

namespace ecoc {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path, std::vector<std::string>& errors)
        : obj_(obj), path_(std::move(path)), errors_(errors) {}

    void number(const char* key, double& out, const std::function<bool(double)>& ok, const char* rule) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_number()) return fail(key, "must be a number");
        const double x = v->get<double>();
        if (!ok(x)) return fail(key, rule);
        out = x;
    }

    void count(const char* key, std::size_t& out, std::size_t min) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_number_unsigned()) return fail(key, "must be a non-negative integer");
        const auto x = v->get<std::uint64_t>();
        if (x < min) return fail(key, "must be >= " + std::to_string(min));
        out = static_cast<std::size_t>(x);
    }

    void u64(const char* key, std::uint64_t& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_number_unsigned()) return fail(key, "must be a non-negative integer");
        out = v->get<std::uint64_t>();
    }

    void text(const char* key, std::string& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_string()) return fail(key, "must be a string");
        out = v->get<std::string>();
    }

    template <typename Enum>
    void choice(const char* key, Enum& out, std::initializer_list<std::pair<const char*, Enum>> options) {
        const json* v = find(key);
        if (!v) return;
        std::string allowed;
        for (const auto& [name, value] : options) {
            if (v->is_string() && v->get<std::string>() == name) {
                out = value;
                return;
            }
            allowed += allowed.empty() ? name : std::string("|") + name;
        }
        fail(key, "must be one of " + allowed);
    }

    const json* object(const char* key) {
        const json* v = find(key);
        if (v && !v->is_object()) {
            fail(key, "must be an object");
            return nullptr;
        }
        return v;
    }

    const json* find(const char* key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void fail(const std::string& key, const std::string& why) { errors_.push_back(path_ + key + ": " + why); }

    void finish() {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) errors_.push_back(path_ + it.key() + ": unknown key");
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

bool positive(double x) { return x > 0.0; }
bool non_negative(double x) { return x >= 0.0; }
bool open_unit(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

SimulationConfig parse_simulation_config(const json& j) {
    SimulationConfig cfg;
    std::vector<std::string> errors;
    if (!j.is_object()) throw ValidationError("config: top level must be an object");

    ObjectReader top(j, "", errors);
    if (const json* m = top.find("model")) {
        if (!m->is_string() || (m->get<std::string>() != "ecoc" && m->get<std::string>() != "onehot"))
            top.fail("model", "must be one of ecoc|onehot");
        else
            cfg.ecoc_model = m->get<std::string>() == "ecoc";
    }
    top.choice("mode", cfg.mode, {{"pseudo_label", RunMode::pseudo_label}, {"supervised", RunMode::supervised}});
    if (const json* s = top.find("seeds")) {
        if (!s->is_array()) {
            top.fail("seeds", "must be an array of non-negative integers");
        } else {
            for (const auto& v : *s) {
                if (!v.is_number_unsigned()) {
                    top.fail("seeds", "must be an array of non-negative integers");
                    cfg.seeds.clear();
                    break;
                }
                cfg.seeds.push_back(v.get<std::uint64_t>());
            }
        }
    }

    if (const json* t = top.object("task")) {
        ObjectReader r(*t, "task.", errors);
        auto& tc = cfg.task;
        r.count("n_classes", tc.n_classes, 2);
        r.count("feature_dim", tc.feature_dim, 2);
        r.count("height", tc.height, 1);
        r.count("width", tc.width, 1);
        r.number("labeled_fraction", tc.labeled_fraction, open_unit, "must lie in (0, 1)");
        r.number("test_fraction", tc.test_fraction, open_unit, "must lie in (0, 1)");
        r.number("separation", tc.separation, positive, "must be positive");
        r.number("noise_scale", tc.noise_scale, positive, "must be positive");
        r.u64("seed", tc.seed);
        r.finish();
        if (tc.labeled_fraction + tc.test_fraction >= 1.0)
            errors.push_back("task: labeled_fraction + test_fraction must be < 1");
    }

    if (const json* t = top.object("train")) {
        ObjectReader r(*t, "train.", errors);
        auto& tr = cfg.train;
        r.number("learning_rate", tr.learning_rate, positive, "must be positive");
        r.count("steps", tr.steps, 0);
        r.count("batch_pixels", tr.batch_pixels, 1);
        r.number("ema_coeff", tr.ema_coeff, open_unit, "must lie in (0, 1)");
        r.number("lambda_u", tr.lambda_u, non_negative, "must be >= 0");
        if (const json* l = r.object("loss")) {
            ObjectReader lr(*l, "train.loss.", errors);
            lr.number("lambda1", tr.loss.lambda1, non_negative, "must be >= 0");
            lr.number("lambda2", tr.loss.lambda2, non_negative, "must be >= 0");
            lr.number("tau", tr.loss.tau, positive, "must be positive");
            lr.finish();
        }
        r.number("T", tr.T, [](double x) { return x >= 0.5 && x <= 1.0; }, "must lie in [0.5, 1]");
        r.number("tau_prime", tr.tau_prime, [](double x) { return x >= 0.0 && x <= 1.0; }, "must lie in [0, 1]");
        r.number("noise_eps", tr.noise_eps, [](double x) { return x >= 0.0 && x < 1.0; }, "must lie in [0, 1)");
        r.choice("noise_mode", tr.noise_mode, {{"none", NoiseMode::none}, {"teacher_flip", NoiseMode::teacher_flip}});
        r.choice("quality_mode", tr.quality_mode,
                 {{"image_weight", QualityMode::image_weight}, {"threshold", QualityMode::threshold}});
        r.choice("label_form", tr.label_form,
                 {{"bitwise", LabelForm::bitwise}, {"codewise", LabelForm::codewise}, {"hybrid", LabelForm::hybrid}});
        r.number("noise_blend", tr.noise_blend, [](double x) { return x >= 0.0 && x <= 1.0; }, "must lie in [0, 1]");
        r.number("init_scale", tr.init_scale, non_negative, "must be >= 0");
        r.count("log_every", tr.log_every, 1);
        r.u64("seed", tr.seed);
        r.finish();
    }

    if (const json* c = top.object("codebook")) {
        ObjectReader r(*c, "codebook.", errors);
        r.choice("strategy", cfg.codebook.strategy, {{"mmd", Strategy::mmd}, {"onehot", Strategy::onehot}});
        r.count("code_length", cfg.codebook.code_length, 1);
        r.u64("iterations", cfg.codebook.iterations);
        r.u64("seed", cfg.codebook.seed);
        r.text("file", cfg.codebook.file);
        r.finish();
        if (cfg.codebook.iterations == 0) errors.push_back("codebook.iterations: must be >= 1");
    }
    top.finish();

    if (!errors.empty()) {
        std::string msg = "config has " + std::to_string(errors.size()) + " schema violation(s): ";
        for (std::size_t i = 0; i < errors.size(); ++i) msg += (i ? "; " : "") + errors[i];
        throw ValidationError(msg, errors);
    }
    return cfg;
}

SimulationConfig parse_simulation_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_simulation_config(j);
}

SimulationConfig load_simulation_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_simulation_config_text(ss.str());
}

ojson to_json(const SimulationConfig& cfg) {
    ojson j;
    j["model"] = cfg.ecoc_model ? "ecoc" : "onehot";
    j["mode"] = cfg.mode == RunMode::pseudo_label ? "pseudo_label" : "supervised";
    const auto& t = cfg.task;
    j["task"] = {{"n_classes", t.n_classes},
                 {"feature_dim", t.feature_dim},
                 {"height", t.height},
                 {"width", t.width},
                 {"labeled_fraction", t.labeled_fraction},
                 {"test_fraction", t.test_fraction},
                 {"separation", t.separation},
                 {"noise_scale", t.noise_scale},
                 {"seed", t.seed}};
    const auto& r = cfg.train;
    ojson train;
    train["learning_rate"] = r.learning_rate;
    train["steps"] = r.steps;
    train["batch_pixels"] = r.batch_pixels;
    train["ema_coeff"] = r.ema_coeff;
    train["lambda_u"] = r.lambda_u;
    train["loss"] = {{"lambda1", r.loss.lambda1}, {"lambda2", r.loss.lambda2}, {"tau", r.loss.tau}};
    train["T"] = r.T;
    train["tau_prime"] = r.tau_prime;
    train["noise_eps"] = r.noise_eps;
    train["noise_mode"] = to_string(r.noise_mode);
    train["quality_mode"] = to_string(r.quality_mode);
    train["label_form"] = std::string(to_string(r.label_form));
    train["noise_blend"] = r.noise_blend;
    train["init_scale"] = r.init_scale;
    train["log_every"] = r.log_every;
    train["seed"] = r.seed;
    j["train"] = train;
    ojson cb;
    cb["strategy"] = std::string(to_string(cfg.codebook.strategy));
    cb["code_length"] = cfg.codebook.code_length;
    cb["iterations"] = cfg.codebook.iterations;
    cb["seed"] = cfg.codebook.seed;
    if (!cfg.codebook.file.empty()) cb["file"] = cfg.codebook.file;
    j["codebook"] = cb;
    if (!cfg.seeds.empty()) j["seeds"] = cfg.seeds;
    return j;
}

ojson to_json(const EvalResult& r) {
    ojson j;
    j["accuracy"] = r.accuracy;
    j["mean_iou"] = r.mean_iou;
    j["per_class_accuracy"] = r.per_class_accuracy;
    j["per_class_iou"] = r.per_class_iou;
    j["confusion"] = r.confusion;
    return j;
}

ojson to_json(const CompareSummary& s) {
    ojson j;
    ojson runs = ojson::array();
    for (const auto& r : s.runs)
        runs.push_back({{"seed", r.seed},
                        {"ecoc_accuracy", r.ecoc_accuracy},
                        {"onehot_accuracy", r.onehot_accuracy},
                        {"ecoc_miou", r.ecoc_miou},
                        {"onehot_miou", r.onehot_miou},
                        {"supervised_ecoc_accuracy", r.supervised_ecoc_accuracy},
                        {"supervised_onehot_accuracy", r.supervised_onehot_accuracy}});
    j["runs"] = runs;
    j["ecoc_median"] = s.ecoc_median;
    j["onehot_median"] = s.onehot_median;
    j["median_gap"] = s.median_gap;
    j["ecoc_wins"] = s.ecoc_wins;
    j["win_rate"] = s.win_rate;
    return j;
}

}  // namespace ecoc
