// Command-line front end: sample generation, basis + fit, sensitivity
// indices with replication, and a method comparison bench.
#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <string>

#include "hofd/errors.hpp"
#include "hofd/pipeline.hpp"
#include "hofd/serialize.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("HOFD_LOG");
    if (!env) return 0;
    try {
        return std::stoi(env);
    } catch (...) {
        return env[0] != '\0' ? 1 : 0;
    }
}

void log_line(int level, const std::string& msg) {
    if (log_level() >= level) std::cerr << "[hofd] " << msg << "\n";
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string method;
    std::int64_t seed = -1;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "JSON run configuration");
    if (config_required) opt->required();
    cmd->add_option("--seed", flags.seed, "override the configured seed");
    cmd->add_option("--jobs", flags.jobs, "parallel replicate workers");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--method", flags.method, "fit method: ols, foba, lars or ridge")
        ->check(CLI::IsMember({"ols", "foba", "lars", "ridge"}));
}

hofd::RunConfig load_with_overrides(const CommonFlags& flags) {
    hofd::RunConfig cfg = hofd::load_run_config(flags.config_path);
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.jobs > 0) cfg.jobs = flags.jobs;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.method.empty()) cfg.fit.method = flags.method;
    cfg.validate();
    return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// Timestamps live in a separate meta file so the data artifacts are
// byte-identical across reruns.
void write_meta(const hofd::RunConfig& cfg, const std::string& command) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["seed"] = cfg.seed;
    meta["method"] = cfg.fit.method;
    meta["written_at"] = static_cast<std::int64_t>(std::time(nullptr));
    hofd::write_text_atomic(join_path(cfg.out_dir, "meta.json"),
                            hofd::to_stable_string(meta));
}

int cmd_sample(const CommonFlags& flags) {
    const hofd::RunConfig cfg = load_with_overrides(flags);
    hofd::Sample sample = hofd::make_sample(cfg, cfg.seed);
    for (const auto& w : sample.warnings) std::cerr << "warning: " << w << "\n";
    const std::string path = join_path(cfg.out_dir, "sample.csv");
    hofd::save_sample(sample, path);
    write_meta(cfg, "sample");
    std::cout << "wrote " << path << " (" << sample.n() << " rows, " << sample.p()
              << " inputs" << (sample.has_response ? " + response" : "") << ")\n";
    return 0;
}

// Builds (or reloads) the basis bundle, then fits. The fit always works from
// the serialized bundle so a rerun reproduces the artifacts byte for byte.
int cmd_fit(const CommonFlags& flags) {
    const hofd::RunConfig cfg = load_with_overrides(flags);
    hofd::Sample sample = hofd::make_sample(cfg, cfg.seed);

    const std::string basis_path = join_path(cfg.out_dir, "basis.json");
    hofd::HofdBasis basis;
    bool reused = false;
    if (std::filesystem::exists(basis_path)) {
        try {
            std::ifstream in(basis_path);
            nlohmann::json j;
            in >> j;
            hofd::HofdBasis candidate = hofd::basis_from_json(j);
            if (candidate.sample_checksum == hofd::matrix_checksum(sample.X) &&
                candidate.config.family == cfg.basis.family &&
                candidate.config.max_order == cfg.basis.max_order &&
                candidate.config.resolved_levels(static_cast<int>(sample.p())) ==
                    cfg.basis.resolved_levels(static_cast<int>(sample.p()))) {
                basis = std::move(candidate);
                reused = true;
            }
        } catch (const std::exception& e) {
            log_line(1, std::string("ignoring stale basis bundle: ") + e.what());
        }
    }
    if (!reused) {
        log_line(1, "building basis");
        basis = hofd::build_hogs_basis(sample.X, cfg.basis);
        hofd::write_text_atomic(basis_path,
                                hofd::to_stable_string(hofd::basis_to_json(basis)));
        // Reload so this run and any rerun fit from identical bits.
        std::ifstream in(basis_path);
        nlohmann::json j;
        in >> j;
        basis = hofd::basis_from_json(j);
    } else {
        log_line(1, "reusing persisted basis bundle");
    }

    const hofd::DesignMatrix design = hofd::assemble_design(basis, sample);
    const hofd::CoefficientVector coef = hofd::fit(design, cfg.fit);
    hofd::write_text_atomic(join_path(cfg.out_dir, "fit.json"),
                            hofd::to_stable_string(hofd::fit_to_json(coef, design)));
    write_meta(cfg, "fit");
    std::cout << "method " << coef.method << ": support " << coef.support.size() << " of "
              << design.m() << " columns, residual " << coef.residual_norm2 << "\n";
    return 0;
}

int cmd_indices(const CommonFlags& flags) {
    const hofd::RunConfig cfg = load_with_overrides(flags);

    if (cfg.replicates <= 1) {
        const hofd::PipelineResult result = hofd::run_pipeline(cfg, cfg.seed);
        hofd::write_text_atomic(
            join_path(cfg.out_dir, "report.json"),
            hofd::to_stable_string(hofd::report_to_json(result.report)));
        hofd::write_text_atomic(join_path(cfg.out_dir, "report.csv"),
                                hofd::report_to_csv(result.report));
        write_meta(cfg, "indices");
        for (const auto& e : result.report.entries) {
            std::cout << e.label << "\t" << e.index << "\n";
        }
        return 0;
    }

    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < cfg.replicates; ++r) {
        seeds.push_back(cfg.seed + static_cast<std::uint64_t>(r));
    }
    const hofd::ReplicateSummary summary = hofd::replicate(
        [&cfg](std::uint64_t seed) { return hofd::run_pipeline(cfg, seed).report; }, seeds,
        cfg.jobs);
    for (const auto& f : summary.failure_messages) {
        std::cerr << "replicate failed: " << f << "\n";
    }
    hofd::write_text_atomic(join_path(cfg.out_dir, "report.json"),
                            hofd::to_stable_string(hofd::replicate_summary_to_json(summary)));
    hofd::write_text_atomic(join_path(cfg.out_dir, "report.csv"),
                            hofd::replicate_summary_to_csv(summary));
    hofd::write_text_atomic(join_path(cfg.out_dir, "boxplot.csv"), hofd::boxplot_csv(summary));
    write_meta(cfg, "indices");
    for (std::size_t i = 0; i < summary.labels.size(); ++i) {
        std::cout << summary.labels[i] << "\t" << summary.mean[static_cast<Eigen::Index>(i)]
                  << "\t(sd " << summary.sd[static_cast<Eigen::Index>(i)] << ")\n";
    }
    return 0;
}

int cmd_bench(const CommonFlags& flags) {
    hofd::RunConfig cfg = load_with_overrides(flags);
    // Sparse methods always run; OLS joins where the design allows it.
    const std::vector<std::string> methods = {"foba", "lars", "ols"};

    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < std::max(cfg.replicates, 2); ++r) {
        seeds.push_back(cfg.seed + static_cast<std::uint64_t>(r));
    }

    nlohmann::json table = nlohmann::json::array();
    std::string csv = "method,label,mean,sd\n";
    std::string support_csv = "method,replicate,seed,support_size\n";
    for (const std::string& method : methods) {
        hofd::RunConfig mcfg = cfg;
        mcfg.fit.method = method;
        std::vector<std::pair<std::uint64_t, int>> supports;
        std::map<std::uint64_t, std::string> checksums;
        std::mutex mtx;
        hofd::ReplicateSummary summary;
        try {
            summary = hofd::replicate(
                [&](std::uint64_t seed) {
                    hofd::PipelineResult result = hofd::run_pipeline(mcfg, seed);
                    {
                        std::lock_guard<std::mutex> lock(mtx);
                        supports.emplace_back(seed,
                                              static_cast<int>(result.coef.support.size()));
                        char hex[17];
                        std::snprintf(hex, sizeof(hex), "%016llx",
                                      static_cast<unsigned long long>(
                                          hofd::matrix_checksum(result.sample.X)));
                        checksums[seed] = hex;
                    }
                    return result.report;
                },
                seeds, cfg.jobs);
        } catch (const hofd::NumericalError& e) {
            std::cerr << "skipping " << method << ": " << e.what() << "\n";
            continue;
        }
        for (const auto& f : summary.failure_messages) {
            std::cerr << "replicate failed (" << method << "): " << f << "\n";
        }
        std::sort(supports.begin(), supports.end());
        std::vector<int> support_sizes;
        for (const auto& [seed, size] : supports) support_sizes.push_back(size);

        nlohmann::json row;
        row["method"] = method;
        row["labels"] = summary.labels;
        row["mean"] = std::vector<double>(summary.mean.data(),
                                          summary.mean.data() + summary.mean.size());
        row["sd"] = std::vector<double>(summary.sd.data(),
                                        summary.sd.data() + summary.sd.size());
        row["support_sizes"] = support_sizes;
        // Per-seed fingerprints of the drawn inputs; equal across methods
        // because every method replays the same seeds.
        nlohmann::json sums = nlohmann::json::object();
        for (const auto& [seed, sum] : checksums) sums[std::to_string(seed)] = sum;
        row["sample_checksums"] = std::move(sums);
        table.push_back(std::move(row));
        for (std::size_t i = 0; i < summary.labels.size(); ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            csv += method + ',' + summary.labels[i] + ',' + std::to_string(summary.mean[j]) +
                   ',' + std::to_string(summary.sd[j]) + '\n';
        }
        for (std::size_t r = 0; r < supports.size(); ++r) {
            support_csv += method + ',' + std::to_string(r + 1) + ',' +
                           std::to_string(supports[r].first) + ',' +
                           std::to_string(supports[r].second) + '\n';
        }
        std::vector<int> sorted_sizes = support_sizes;
        std::sort(sorted_sizes.begin(), sorted_sizes.end());
        std::cout << method << ": median support "
                  << (sorted_sizes.empty() ? 0 : sorted_sizes[sorted_sizes.size() / 2])
                  << "\n";
    }
    nlohmann::json out;
    out["kind"] = "hofd_bench";
    out["rows"] = std::move(table);
    hofd::write_text_atomic(join_path(cfg.out_dir, "bench.json"), hofd::to_stable_string(out));
    hofd::write_text_atomic(join_path(cfg.out_dir, "bench.csv"), csv);
    hofd::write_text_atomic(join_path(cfg.out_dir, "bench_support.csv"), support_csv);
    write_meta(cfg, "bench");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensitivity decomposition of black-box responses under dependent inputs"};
    app.require_subcommand(1);

    CommonFlags sample_flags, fit_flags, indices_flags, bench_flags;
    auto* sample_cmd = app.add_subcommand("sample", "draw an input/response sample to CSV");
    add_common(sample_cmd, sample_flags);
    auto* fit_cmd = app.add_subcommand("fit", "build the basis and fit coefficients");
    add_common(fit_cmd, fit_flags);
    auto* indices_cmd = app.add_subcommand("indices", "estimate sensitivity indices");
    add_common(indices_cmd, indices_flags);
    auto* bench_cmd = app.add_subcommand("bench", "compare sparse fitters on one config");
    add_common(bench_cmd, bench_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (sample_cmd->parsed()) return cmd_sample(sample_flags);
        if (fit_cmd->parsed()) return cmd_fit(fit_flags);
        if (indices_cmd->parsed()) return cmd_indices(indices_flags);
        if (bench_cmd->parsed()) return cmd_bench(bench_flags);
    } catch (const hofd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hofd::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const hofd::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
