#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecoc/simulator.hpp"
#include "json.hpp"

namespace ecoc {

enum class RunMode { pseudo_label, supervised };

// JSON run description. "train" mirrors TrainConfig field names; "seeds" is
// only read by the compare command.
struct SimulationConfig {
    TaskConfig task;
    TrainConfig train;
    CodebookSpec codebook;
    bool ecoc_model = true;
    RunMode mode = RunMode::pseudo_label;
    std::vector<std::uint64_t> seeds;
};

// Collects every schema violation (unknown keys, wrong types, out-of-range
// values) and throws a single ValidationError listing all of them.
SimulationConfig parse_simulation_config(const nlohmann::json& j);
SimulationConfig parse_simulation_config_text(const std::string& text);
SimulationConfig load_simulation_config(const std::string& path);

nlohmann::ordered_json to_json(const SimulationConfig& cfg);
nlohmann::ordered_json to_json(const EvalResult& r);
nlohmann::ordered_json to_json(const CompareSummary& s);

}  // namespace ecoc
