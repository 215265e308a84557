#pragma once

#include <map>
#include <string>
#include <vector>

#include "blockrip/config.hpp"

namespace blockrip {

// Commands: sample, psi-norm, ric-exact, ric-mc, chaos-tail, moment-check,
// chaining, phase-transition, recover, increment-check.
const std::vector<std::string>& experiment_commands();

struct ExperimentResult {
    std::string command;
    std::string csv;        // includes the leading "# config_hash=..." line
    std::string meta_json;  // config echo, hash, version, summary, wall time
    std::map<std::string, double> summary;
};

// Empty iff the config can run the command; each entry is "field: rule".
std::vector<std::string> validate_config(const ConfigMap& cfg, const std::string& command);

// Validates, dispatches to the owning module, writes <out> and
// <out>.meta.json when the config names an output path, and returns the
// in-memory result. Identical config and seed give byte-identical CSV.
ExperimentResult run_experiment(const ConfigMap& cfg, const std::string& command);

// Reads back a result CSV and checks its embedded config hash; mismatch is
// a ValidationError.
std::string load_result_csv(const std::string& path, const std::string& expected_hash);

// Shortest-round-trip double formatting used for all CSV payloads.
std::string format_double(double v);

}  // namespace blockrip
