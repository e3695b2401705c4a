#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hofd/hogs.hpp"
#include "hofd/indices.hpp"
#include "hofd/models.hpp"
#include "hofd/regression.hpp"

namespace hofd {

// Everything a run needs, loadable from a JSON config file with flag
// overrides layered on top by the front end.
struct RunConfig {
    // Input: exactly one of `model`, `sample_path`, or `inputs` drives the
    // sample; `sample_path` may carry its own response column, the others
    // need a named model response.
    std::string model;        // "toy" | "vessel" | ""
    std::string sample_path;  // CSV (x1..xp[,y])
    std::optional<InputModel> inputs;
    std::string response;     // model name for the response when sampling custom inputs
    std::int64_t n = 0;

    HogsConfig basis;
    FitConfig fit;

    int replicates = 1;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir = "out";

    void validate() const;  // throws ConfigError
};

RunConfig load_run_config(const std::string& path);

struct PipelineResult {
    Sample sample;
    HofdBasis basis;
    DesignMatrix design;
    GramMatrix gram;  // of the full design, condition estimate included
    CoefficientVector coef;
    SensitivityReport report;
};

// Draw (or load) the sample for `seed`, attach the response, build the
// basis, fit, and estimate indices. The report's invariants are asserted
// before returning.
PipelineResult run_pipeline(const RunConfig& config, std::uint64_t seed);

// The sample stage alone (used by the sample subcommand and by replicates).
Sample make_sample(const RunConfig& config, std::uint64_t seed);

}  // namespace hofd
