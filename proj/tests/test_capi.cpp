// Exercises the shared-library surface only: opaque handles, status codes,
// and the ownership contract from include/fpplab.h.
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <unistd.h>
#include <string>

#include "fpplab.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int c = 0;
        path = fs::temp_directory_path() / ("fpplab_capi_" + std::to_string(::getpid()) +
                                            "_" + std::to_string(c++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const char* kConfig =
    "model.kind = constant\n"
    "model.value = 1\n"
    "grid.h = 0.5\n"
    "grid.half_extent = 8\n"
    "estimator.kind = mu\n"
    "mu.direction = 1 0\n"
    "mu.n = 4\n"
    "run.replicas = 3\n"
    "run.seed = 5\n"
    "run.threads = 1\n";

}  // namespace

TEST_CASE("version string is set") {
    CHECK(std::strlen(fpplab_version()) > 0);
}

TEST_CASE("parse + validate + run through the C surface") {
    fpplab_config* cfg = nullptr;
    REQUIRE(fpplab_config_parse_text(kConfig, &cfg) == FPPLAB_OK);
    CHECK(fpplab_config_error_count(cfg) == 0);

    TempDir tmp;
    fpplab_run* run = nullptr;
    REQUIRE(fpplab_run_experiment(cfg, tmp.path.c_str(), &run) == FPPLAB_OK);
    CHECK(fs::exists(fpplab_run_manifest_path(run)));
    bool saw_mu = false;
    for (size_t i = 0; i < fpplab_run_output_count(run); ++i)
        if (std::string(fpplab_run_output(run, i)) == "mu.csv") saw_mu = true;
    CHECK(saw_mu);
    CHECK(fpplab_run_warning_count(run) == 0);

    // second run into the same root hits the no-overwrite rule
    fpplab_run* run2 = nullptr;
    CHECK(fpplab_run_experiment(cfg, tmp.path.c_str(), &run2) == FPPLAB_RESOURCE_LIMIT);
    CHECK(std::strlen(fpplab_last_error()) > 0);

    fpplab_run_free(run);
    fpplab_config_free(cfg);
}

TEST_CASE("validation errors are enumerable through the handle") {
    fpplab_config* cfg = nullptr;
    REQUIRE(fpplab_config_parse_text("model.kind = voronoi\nmodel.p = 2\n", &cfg) ==
            FPPLAB_OK);
    const size_t n = fpplab_config_error_count(cfg);
    CHECK(n >= 2);
    bool saw_p = false;
    for (size_t i = 0; i < n; ++i)
        if (std::string(fpplab_config_error(cfg, i)).find("model.p") != std::string::npos)
            saw_p = true;
    CHECK(saw_p);

    // fixing the fields clears the error list
    fpplab_config_set(cfg, "model.p", "0.5");
    fpplab_config_set(cfg, "run.seed", "1");
    fpplab_config_set(cfg, "estimator.kind", "sample");
    CHECK(fpplab_config_error_count(cfg) == 0);
    fpplab_config_free(cfg);
}

TEST_CASE("malformed documents fail at parse time") {
    fpplab_config* cfg = nullptr;
    CHECK(fpplab_config_parse_text("this is not a key value line\n", &cfg) ==
          FPPLAB_INVALID_CONFIG);
    CHECK(std::strlen(fpplab_last_error()) > 0);
    CHECK(fpplab_config_parse_file("/nonexistent/path.conf", &cfg) == FPPLAB_INVALID_CONFIG);
}

TEST_CASE("running an invalid config reports INVALID_CONFIG") {
    fpplab_config* cfg = nullptr;
    REQUIRE(fpplab_config_parse_text("model.kind = voronoi\n", &cfg) == FPPLAB_OK);
    TempDir tmp;
    fpplab_run* run = nullptr;
    CHECK(fpplab_run_experiment(cfg, tmp.path.c_str(), &run) == FPPLAB_INVALID_CONFIG);
    fpplab_config_free(cfg);
}
