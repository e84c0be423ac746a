#include <fstream>
#include <sstream>

#include "ecoc/codebook.hpp"
#include "ecoc/error.hpp"
#include "json.hpp"

namespace ecoc {

using ojson = nlohmann::ordered_json;

std::string to_json_string(const Codebook& cb, const FileHeader& header) {
    ojson j;
    ojson meta;
    meta["tool"] = "ecoc";
    meta["version"] = ECOC_VERSION;
    meta["command"] = header.command;
    meta["seed"] = header.seed ? ojson(*header.seed) : ojson(nullptr);
    j["meta"] = meta;
    j["n_classes"] = cb.n_classes();
    j["code_length"] = cb.code_length();
    j["rows"] = cb.row_strings();
    if (!cb.class_names.empty()) j["class_names"] = cb.class_names;
    j["strategy"] = std::string(to_string(cb.strategy));
    j["seed"] = cb.seed ? ojson(*cb.seed) : ojson(nullptr);
    j["iterations"] = cb.iterations ? ojson(*cb.iterations) : ojson(nullptr);
    j["prng"] = cb.prng.empty() ? ojson(nullptr) : ojson(cb.prng);
    const auto s = separation_stats(cb);
    j["stats"] = {{"d_min_row", s.d_min_row}, {"d_min_col", s.d_min_col}, {"d_max_col", s.d_max_col}};
    return j.dump(2) + "\n";
}

void save(const Codebook& cb, const std::filesystem::path& path, const FileHeader& header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write codebook file " + path.string());
    out << to_json_string(cb, header);
    if (!out) throw ValidationError("failed writing codebook file " + path.string());
}

LoadedCodebook from_json_string(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ValidationError(std::string("malformed codebook JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("malformed codebook file: top level is not an object");
    for (const char* key : {"n_classes", "code_length", "rows"})
        if (!j.contains(key)) throw ValidationError(std::string("malformed codebook file: missing key '") + key + "'");

    try {
        const auto n = j.at("n_classes").get<std::size_t>();
        const auto k = j.at("code_length").get<std::size_t>();
        const auto rows = j.at("rows").get<std::vector<std::string>>();
        if (rows.size() != n)
            throw ValidationError("dimension mismatch: n_classes=" + std::to_string(n) + " but " +
                                  std::to_string(rows.size()) + " rows");
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].size() != k)
                throw ValidationError("dimension mismatch: row " + std::to_string(i) + " has length " +
                                      std::to_string(rows[i].size()) + ", code_length=" + std::to_string(k));

        const Strategy strategy =
            j.contains("strategy") ? strategy_from_string(j.at("strategy").get<std::string>()) : Strategy::custom;
        Codebook cb = Codebook::from_strings(rows, strategy);
        if (j.contains("class_names") && !j.at("class_names").is_null())
            cb.class_names = j.at("class_names").get<std::vector<std::string>>();
        if (j.contains("seed") && !j.at("seed").is_null()) cb.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("iterations") && !j.at("iterations").is_null())
            cb.iterations = j.at("iterations").get<std::uint64_t>();
        if (j.contains("prng") && !j.at("prng").is_null()) cb.prng = j.at("prng").get<std::string>();

        LoadedCodebook out{std::move(cb), {}};
        out.report = validate(out.codebook);
        if (j.contains("stats") && j.at("stats").is_object()) {
            const auto s = separation_stats(out.codebook);
            const auto& st = j.at("stats");
            auto check = [&](const char* key, std::size_t actual) {
                if (st.contains(key) && st.at(key).get<std::size_t>() != actual)
                    out.report.violations.push_back(std::string("stored stats disagree: ") + key + "=" +
                                                    std::to_string(st.at(key).get<std::size_t>()) + ", actual " +
                                                    std::to_string(actual));
            };
            check("d_min_row", s.d_min_row);
            check("d_min_col", s.d_min_col);
            check("d_max_col", s.d_max_col);
        }
        return out;
    } catch (const ojson::exception& e) {
        throw ValidationError(std::string("malformed codebook file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("malformed codebook file: ") + e.what());
    }
}

LoadedCodebook load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open codebook file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

}  // namespace ecoc
