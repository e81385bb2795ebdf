#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"

namespace fpp {

/// Invalid configuration; carries the field-level error list (CLI exit 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> errs)
        : std::runtime_error(errs.empty() ? "invalid config" : errs.front()),
          errors(std::move(errs)) {}
    std::vector<std::string> errors;
};

/// Resource limits: node budget, or an already-existing output directory
/// (runs never overwrite). CLI exit 3.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunResult {
    std::string out_dir;
    std::string manifest_path;
    std::vector<std::string> outputs;  // file names relative to out_dir
    std::vector<std::string> warnings;
};

/// Validates the config, runs the selected estimator over parallel replicas,
/// and writes CSV outputs plus a JSONL manifest into the content-addressed
/// subdirectory <out_root>/<config-hash>-s<seed>.
RunResult run_experiment(const ConfigDoc& doc, const std::string& out_root);

/// Re-runs the configuration embedded in a manifest; outputs land under
/// new_out_root and are byte-identical to the original run's CSVs.
RunResult replay_manifest(const std::string& manifest_path, const std::string& new_out_root);

}  // namespace fpp
