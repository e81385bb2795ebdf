#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "model.hpp"

namespace fpp {

/// Flat key-value document with dotted sections:
///   model.kind = voronoi
///   mu.n = 8 16 32        # lists are space-separated
/// '#' starts a comment. Keys are unique; later assignments override.
class ConfigDoc {
public:
    static ConfigDoc parse(const std::string& text);
    static ConfigDoc parse_file(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    const std::string* find(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    /// Canonical form: sorted keys, one per line; the config hash is taken
    /// over this text.
    std::string canonical() const;
    std::uint64_t hash() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

enum class TaskKind { kSample, kMu, kOneArm, kCrossing, kInd, kRenorm, kBallShape };

const char* task_kind_name(TaskKind k);

/// Fully validated experiment description.
struct ExperimentSpec {
    ModelSpec model;
    TaskKind task = TaskKind::kMu;
    double half_extent = 8.0;

    // mu
    std::array<double, 3> direction{1, 0, 0};
    std::vector<double> n_list;
    // one-arm
    std::vector<double> radii;
    std::size_t fit_lo = 0, fit_hi = std::numeric_limits<std::size_t>::max();
    // crossing
    RectSpec rect;
    std::vector<double> scales;
    int colour = 0;
    // ind / renorm
    double Q = 2, S = 8, R = 4, delta = 0.5;
    // ball shape
    std::vector<double> t_list;
    int bins = 32;
    // run
    int replicas = 100;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency
};

/// Parses and validates; on failure returns the full list of field-level
/// error messages instead of a spec.
struct ValidationResult {
    std::vector<std::string> errors;
    ExperimentSpec spec;  // valid only when errors is empty
    bool ok() const { return errors.empty(); }
};

ValidationResult validate_config(const ConfigDoc& doc);

}  // namespace fpp
