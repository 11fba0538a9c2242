#pragma once

#include <string>

#include "scout/engine.hpp"
#include "scout/environments.hpp"
#include "scout/simulator.hpp"

namespace scout {

/// Everything one `explore` run needs, resolved from a key = value config
/// file plus command-line overrides.
struct RunSpec {
    EngineConfig engine;
    int iterations = 10;
    std::string environment = "sim"; // sim | corpus
    SimParams sim;
    CorpusEnvConfig corpus;
    std::string checkpoint_path; // write buffer checkpoints here when set
    std::string resume_path;     // start from this checkpoint when set
};

/// Named descriptor lists selectable via `descriptor_list = <name>`.
const std::vector<std::string>& builtin_descriptor_list(const std::string& name);

RunSpec load_run_spec(const std::string& path);

/// Flat key=value snapshot of a resolved spec (manifest + reproducibility).
std::vector<std::pair<std::string, std::string>> run_spec_snapshot(const RunSpec& spec);

} // namespace scout
