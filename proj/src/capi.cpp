#include "fpplab.h"

#include <string>
#include <vector>

#include "config.hpp"
#include "runner.hpp"

using namespace fpp;

struct fpplab_config {
    ConfigDoc doc;
    mutable std::vector<std::string> errors;
    mutable bool validated = false;

    void ensure_validated() const {
        if (validated) return;
        errors = validate_config(doc).errors;
        validated = true;
    }
};

struct fpplab_run {
    RunResult result;
};

namespace {

thread_local std::string t_last_error;

fpplab_status fail(fpplab_status code, const std::string& msg) {
    t_last_error = msg;
    return code;
}

}  // namespace

extern "C" {

const char* fpplab_version(void) { return "0.1.0"; }

const char* fpplab_last_error(void) { return t_last_error.c_str(); }

fpplab_status fpplab_config_parse_text(const char* text, fpplab_config** out_cfg) {
    if (!text || !out_cfg) return fail(FPPLAB_INVALID_CONFIG, "null argument");
    try {
        auto* cfg = new fpplab_config{ConfigDoc::parse(text), {}, false};
        *out_cfg = cfg;
        return FPPLAB_OK;
    } catch (const std::exception& e) {
        return fail(FPPLAB_INVALID_CONFIG, e.what());
    }
}

fpplab_status fpplab_config_parse_file(const char* path, fpplab_config** out_cfg) {
    if (!path || !out_cfg) return fail(FPPLAB_INVALID_CONFIG, "null argument");
    try {
        auto* cfg = new fpplab_config{ConfigDoc::parse_file(path), {}, false};
        *out_cfg = cfg;
        return FPPLAB_OK;
    } catch (const std::exception& e) {
        return fail(FPPLAB_INVALID_CONFIG, e.what());
    }
}

fpplab_status fpplab_config_set(fpplab_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(FPPLAB_INVALID_CONFIG, "null argument");
    cfg->doc.set(key, value);
    cfg->validated = false;
    return FPPLAB_OK;
}

size_t fpplab_config_error_count(const fpplab_config* cfg) {
    if (!cfg) return 0;
    cfg->ensure_validated();
    return cfg->errors.size();
}

const char* fpplab_config_error(const fpplab_config* cfg, size_t index) {
    if (!cfg) return "";
    cfg->ensure_validated();
    return index < cfg->errors.size() ? cfg->errors[index].c_str() : "";
}

void fpplab_config_free(fpplab_config* cfg) { delete cfg; }

fpplab_status fpplab_run_experiment(const fpplab_config* cfg, const char* out_root,
                                    fpplab_run** out_run) {
    if (!cfg || !out_root || !out_run) return fail(FPPLAB_INVALID_CONFIG, "null argument");
    try {
        auto* run = new fpplab_run{run_experiment(cfg->doc, out_root)};
        *out_run = run;
        return FPPLAB_OK;
    } catch (const ConfigError& e) {
        std::string msg;
        for (const auto& err : e.errors) {
            if (!msg.empty()) msg += "; ";
            msg += err;
        }
        return fail(FPPLAB_INVALID_CONFIG, msg);
    } catch (const ResourceError& e) {
        return fail(FPPLAB_RESOURCE_LIMIT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(FPPLAB_INVALID_CONFIG, e.what());
    } catch (const std::length_error& e) {
        return fail(FPPLAB_RESOURCE_LIMIT, e.what());
    } catch (const std::exception& e) {
        return fail(FPPLAB_INTERNAL, e.what());
    }
}

const char* fpplab_run_out_dir(const fpplab_run* run) {
    return run ? run->result.out_dir.c_str() : "";
}

const char* fpplab_run_manifest_path(const fpplab_run* run) {
    return run ? run->result.manifest_path.c_str() : "";
}

size_t fpplab_run_output_count(const fpplab_run* run) {
    return run ? run->result.outputs.size() : 0;
}

const char* fpplab_run_output(const fpplab_run* run, size_t index) {
    if (!run || index >= run->result.outputs.size()) return "";
    return run->result.outputs[index].c_str();
}

size_t fpplab_run_warning_count(const fpplab_run* run) {
    return run ? run->result.warnings.size() : 0;
}

const char* fpplab_run_warning(const fpplab_run* run, size_t index) {
    if (!run || index >= run->result.warnings.size()) return "";
    return run->result.warnings[index].c_str();
}

void fpplab_run_free(fpplab_run* run) { delete run; }

}  // extern "C"
