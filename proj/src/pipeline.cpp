#include "hofd/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "hofd/errors.hpp"
#include "hofd/serialize.hpp"

namespace hofd {

namespace {

InputSpec input_spec_from_json(const nlohmann::json& j) {
    InputSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    auto get_vec = [&](const char* key) {
        const auto& a = j.at(key);
        Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
        return v;
    };
    auto get_mat = [&](const char* key) {
        const auto& a = j.at(key);
        const auto rows = static_cast<Eigen::Index>(a.size());
        const auto cols = rows > 0 ? static_cast<Eigen::Index>(a[0].size()) : 0;
        Eigen::MatrixXd M(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (static_cast<Eigen::Index>(a[static_cast<std::size_t>(r)].size()) != cols) {
                throw ConfigError(std::string("ragged matrix under '") + key + "'");
            }
            for (Eigen::Index c = 0; c < cols; ++c) {
                M(r, c) = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
            }
        }
        return M;
    };
    if (spec.kind == "gaussian") {
        spec.mean = get_vec("mean");
        spec.cov = get_mat("cov");
    } else if (spec.kind == "gaussian_mixture") {
        spec.alpha = j.at("alpha").get<double>();
        spec.mean = get_vec("mean");
        spec.cov = get_mat("cov");
        spec.cov2 = get_mat("cov2");
    } else if (spec.kind == "correlated_uniform") {
        spec.lower = get_vec("lower");
        spec.upper = get_vec("upper");
        spec.spearman = get_mat("spearman");
    } else {
        throw ConfigError("unknown input kind '" + spec.kind + "'");
    }
    return spec;
}

}  // namespace

void RunConfig::validate() const {
    int sources = 0;
    if (!model.empty()) ++sources;
    if (!sample_path.empty()) ++sources;
    if (inputs.has_value()) ++sources;
    if (sources != 1) {
        throw ConfigError("configure exactly one input source: a named model, a sample file, "
                          "or an inputs block");
    }
    if (sample_path.empty() && n < 2) {
        throw ConfigError("sample size must be at least 2");
    }
    if (!sample_path.empty() && !std::filesystem::exists(sample_path)) {
        throw ConfigError("sample file '" + sample_path + "' does not exist");
    }
    if (inputs.has_value() && response.empty()) {
        throw ConfigError("custom inputs need a named response model");
    }
    if (replicates < 1) throw ConfigError("replicate count must be at least 1");
    if (jobs < 1) throw ConfigError("job count must be at least 1");
    if (basis.max_order < 1) throw ConfigError("interaction order must be at least 1");
    fit.validate();
    if (basis.family != "hermite" && basis.family != "bspline") {
        throw ConfigError("unknown basis family '" + basis.family + "'");
    }
    for (int L : basis.levels) {
        if (L < 1) throw ConfigError("every basis size must be at least 1");
    }
}

RunConfig load_run_config(const std::string& path) {
    nlohmann::json j;
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
        }
    }
    RunConfig cfg;
    try {
        cfg.model = j.value("model", std::string());
        cfg.sample_path = j.value("sample", std::string());
        cfg.response = j.value("response", std::string());
        cfg.n = j.value("n", static_cast<std::int64_t>(0));
        cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
        cfg.replicates = j.value("replicates", 1);
        cfg.jobs = j.value("jobs", 1);
        cfg.out_dir = j.value("out", std::string("out"));

        if (j.contains("inputs")) {
            InputModel model;
            for (const auto& b : j["inputs"]) model.blocks.push_back(input_spec_from_json(b));
            cfg.inputs = std::move(model);
        }

        if (j.contains("basis")) {
            const auto& b = j["basis"];
            cfg.basis.family = b.value("family", std::string("hermite"));
            cfg.basis.max_order = b.value("max_order", 2);
            cfg.basis.spline_degree = b.value("spline_degree", 3);
            if (b.contains("levels")) {
                if (b["levels"].is_number_integer()) {
                    cfg.basis.levels = {b["levels"].get<int>()};
                } else {
                    cfg.basis.levels = b["levels"].get<std::vector<int>>();
                }
            }
        }
        if (cfg.basis.levels.empty()) cfg.basis.levels = {5};

        if (j.contains("fit")) {
            const auto& f = j["fit"];
            cfg.fit.method = f.value("method", std::string("foba"));
            cfg.fit.foba_nu = f.value("nu", 0.5);
            cfg.fit.foba_epsilon = f.value("epsilon", 0.0);
            cfg.fit.foba_sigma2 = f.value("sigma2", -1.0);
            cfg.fit.foba_max_steps = f.value("max_steps", 0);
            cfg.fit.lars_max_steps = f.value("lars_max_steps", 0);
            cfg.fit.cv_folds = f.value("cv_folds", 5);
            cfg.fit.cv_seed = f.value("cv_seed", static_cast<std::uint64_t>(0));
            cfg.fit.ridge_lambda = f.value("ridge_lambda", 0.3);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "' has a malformed field: " + e.what());
    }
    cfg.validate();
    return cfg;
}

Sample make_sample(const RunConfig& config, std::uint64_t seed) {
    if (!config.sample_path.empty()) {
        Sample s = load_sample(config.sample_path);
        if (!s.has_response) {
            if (config.response.empty()) {
                throw DataError("sample file '" + config.sample_path +
                                "' has no response column and no response model is named");
            }
            s.y = model_response(config.response, s.X);
            s.has_response = true;
        }
        return s;
    }
    InputModel model =
        config.inputs.has_value() ? *config.inputs : input_model_by_name(config.model);
    Sample s = model.sample(config.n, seed);
    const std::string response = config.response.empty() ? config.model : config.response;
    s.y = model_response(response, s.X);
    s.has_response = true;
    return s;
}

PipelineResult run_pipeline(const RunConfig& config, std::uint64_t seed) {
    PipelineResult result;
    result.sample = make_sample(config, seed);
    result.basis = build_hogs_basis(result.sample.X, config.basis);
    result.design = assemble_design(result.basis, result.sample);
    // With fewer rows than columns the Gram is singular by rank alone and the
    // sparse fitters handle that; at n >= m a singular Gram is a hard error.
    result.gram = gram_matrix(result.design.Phi,
                              result.design.n() >= result.design.m());
    result.coef = fit(result.design, config.fit);
    const ComponentSet components = reconstruct_components(result.design, result.coef);
    result.report = estimate_indices(components);
    result.report.method = result.coef.method;
    result.report.seed = seed;
    return result;
}

}  // namespace hofd
