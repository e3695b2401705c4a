#include <doctest.h>

#ifndef HOFD_CLI_PATH
#define HOFD_CLI_PATH ""
#endif

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hofd/distributions.hpp"
#include "hofd/models.hpp"

namespace fs = std::filesystem;

namespace {

// Scratch directory shared by the CLI cases, recreated per test case.
struct Scratch {
    fs::path dir;

    Scratch() {
        dir = fs::temp_directory_path() / "hofd_cli_tests";
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const Scratch& scratch, const std::string& args) {
    const std::string out_file = scratch.path("stdout.txt");
    const std::string err_file = scratch.path("stderr.txt");
    const std::string cmd = std::string(HOFD_CLI_PATH) + " " + args + " > " + out_file +
                            " 2> " + err_file;
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = raw < 0 ? raw : (raw >> 8) & 0xff;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

void write_config(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << "\n";
}

nlohmann::json toy_config(const Scratch& scratch, const std::string& out_name,
                          std::int64_t n, int L, int d, const std::string& method) {
    nlohmann::json j;
    j["model"] = "toy";
    j["n"] = n;
    j["seed"] = 1;
    j["out"] = scratch.path(out_name);
    j["basis"] = {{"family", "hermite"}, {"levels", L}, {"max_order", d}};
    j["fit"] = {{"method", method}};
    return j;
}

bool have_cli() { return !std::string(HOFD_CLI_PATH).empty(); }

}  // namespace

TEST_CASE("sample runs are byte-identical until the seed changes") {
    if (!have_cli()) return;
    Scratch scratch;
    write_config(scratch.path("a.json"), toy_config(scratch, "out_a", 50, 2, 2, "foba"));
    write_config(scratch.path("b.json"), toy_config(scratch, "out_b", 50, 2, 2, "foba"));

    CHECK(run_cli(scratch, "sample --config " + scratch.path("a.json")).exit_code == 0);
    CHECK(run_cli(scratch, "sample --config " + scratch.path("b.json")).exit_code == 0);
    const std::string a = slurp(scratch.dir / "out_a" / "sample.csv");
    const std::string b = slurp(scratch.dir / "out_b" / "sample.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);

    CHECK(run_cli(scratch, "sample --config " + scratch.path("b.json") + " --seed 9")
              .exit_code == 0);
    CHECK(slurp(scratch.dir / "out_b" / "sample.csv") != a);
}

TEST_CASE("a non-positive-definite covariance fails with a clear config error") {
    if (!have_cli()) return;
    Scratch scratch;
    nlohmann::json j;
    j["inputs"] = nlohmann::json::array();
    j["inputs"].push_back({{"kind", "gaussian"},
                           {"mean", {0.0, 0.0, 0.0}},
                           {"cov", {{1.0, 2.0, 0.0}, {2.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}});
    j["response"] = "toy";
    j["n"] = 100;
    j["out"] = scratch.path("out_bad");
    write_config(scratch.path("bad.json"), j);

    const RunResult r = run_cli(scratch, "sample --config " + scratch.path("bad.json"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("positive definite") != std::string::npos);
}

TEST_CASE("fit produces a parsable artifact and reruns reproduce it exactly") {
    if (!have_cli()) return;
    Scratch scratch;
    write_config(scratch.path("fit.json"), toy_config(scratch, "out_fit", 200, 10, 2, "foba"));

    const RunResult first = run_cli(scratch, "fit --config " + scratch.path("fit.json"));
    REQUIRE(first.exit_code == 0);
    CHECK(first.out.find("support") != std::string::npos);

    const fs::path artifact = scratch.dir / "out_fit" / "fit.json";
    const std::string bytes_first = slurp(artifact);
    const nlohmann::json fit = nlohmann::json::parse(bytes_first);
    CHECK(fit["kind"] == "hofd_fit");
    CHECK(fit["method"] == "foba");
    const int support = fit["support_size"].get<int>();
    CHECK(support >= 5);
    CHECK(support <= 9);
    CHECK(fit["design"]["columns"].get<int>() == 330);
    CHECK(fit["design"]["rows"].get<int>() == 200);
    CHECK(fit["design"]["gram_rcond"].is_number());
    CHECK(!fit["trace"].empty());

    const RunResult second = run_cli(scratch, "fit --config " + scratch.path("fit.json"));
    REQUIRE(second.exit_code == 0);
    CHECK(slurp(artifact) == bytes_first);
    const std::string basis_bytes = slurp(scratch.dir / "out_fit" / "basis.json");
    CHECK(!basis_bytes.empty());
}

TEST_CASE("requesting plain least squares on a fat design exits with guidance") {
    if (!have_cli()) return;
    Scratch scratch;
    write_config(scratch.path("fat.json"), toy_config(scratch, "out_fat", 200, 10, 2, "ols"));
    const RunResult r = run_cli(scratch, "fit --config " + scratch.path("fat.json"));
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("numerical error") != std::string::npos);
    CHECK(r.err.find("foba") != std::string::npos);
}

TEST_CASE("a single indices run writes a closed, labeled report") {
    if (!have_cli()) return;
    Scratch scratch;
    write_config(scratch.path("ind.json"), toy_config(scratch, "out_ind", 400, 3, 2, "ols"));
    const RunResult r = run_cli(scratch, "indices --config " + scratch.path("ind.json"));
    REQUIRE(r.exit_code == 0);

    const nlohmann::json report =
        nlohmann::json::parse(slurp(scratch.dir / "out_ind" / "report.json"));
    CHECK(report["kind"] == "hofd_report");
    CHECK(std::abs(report["sum"].get<double>() - 1.0) < 1e-10);
    bool saw_pair = false;
    bool saw_rest = false;
    for (const auto& e : report["indices"]) {
        if (e["label"] == "1.2") saw_pair = true;
        if (e["label"] == "rest") saw_rest = true;
    }
    CHECK(saw_pair);
    CHECK(saw_rest);

    const std::string csv = slurp(scratch.dir / "out_ind" / "report.csv");
    CHECK(csv.rfind("label,index,var_part,cov_part\n", 0) == 0);
    CHECK(r.out.find("1.2") != std::string::npos);
}

TEST_CASE("replicated indices write per-draw rows and summary quantiles") {
    if (!have_cli()) return;
    Scratch scratch;
    nlohmann::json j = toy_config(scratch, "out_rep", 150, 3, 2, "ols");
    j["replicates"] = 5;
    write_config(scratch.path("rep.json"), j);
    const RunResult r = run_cli(scratch, "indices --config " + scratch.path("rep.json"));
    REQUIRE(r.exit_code == 0);

    const nlohmann::json report =
        nlohmann::json::parse(slurp(scratch.dir / "out_rep" / "report.json"));
    CHECK(report["kind"] == "hofd_replicates");
    CHECK(report["requested"].get<int>() == 5);
    CHECK(report["failed"].get<int>() == 0);
    CHECK(report["draws"].size() == 5);
    CHECK(report["labels"].size() == 7);  // 3 + 3 subsets + rest

    // Every draw closes to one on its own.
    for (const auto& row : report["draws"]) {
        double sum = 0.0;
        for (const auto& v : row) sum += v.get<double>();
        CHECK(std::abs(sum - 1.0) < 1e-10);
    }

    const std::string box = slurp(scratch.dir / "out_rep" / "boxplot.csv");
    CHECK(box.rfind("label,replicate,seed,value\n", 0) == 0);
    int lines = -1;  // discount the header
    for (const char c : box) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 5 * 7);
    const std::string csv = slurp(scratch.dir / "out_rep" / "report.csv");
    CHECK(csv.rfind("label,mean,sd,q25,median,q75\n", 0) == 0);
}

TEST_CASE("indices are unchanged when the stored response is rescaled") {
    if (!have_cli()) return;
    Scratch scratch;

    // Build two CSVs outside the CLI: same inputs, response scaled by ten.
    hofd::Sample s = hofd::toy_input_model().sample(300, 3);
    s.y = hofd::toy_response(s.X);
    s.has_response = true;
    hofd::save_sample(s, scratch.path("data1.csv"));
    s.y *= 10.0;
    hofd::save_sample(s, scratch.path("data2.csv"));

    for (const int k : {1, 2}) {
        nlohmann::json j;
        j["sample"] = scratch.path("data" + std::to_string(k) + ".csv");
        j["out"] = scratch.path("out_scale" + std::to_string(k));
        j["basis"] = {{"family", "hermite"}, {"levels", 3}, {"max_order", 2}};
        j["fit"] = {{"method", "ols"}};
        write_config(scratch.path("scale" + std::to_string(k) + ".json"), j);
        REQUIRE(run_cli(scratch, "indices --config " +
                                     scratch.path("scale" + std::to_string(k) + ".json"))
                    .exit_code == 0);
    }
    const nlohmann::json a =
        nlohmann::json::parse(slurp(scratch.dir / "out_scale1" / "report.json"));
    const nlohmann::json b =
        nlohmann::json::parse(slurp(scratch.dir / "out_scale2" / "report.json"));
    REQUIRE(a["indices"].size() == b["indices"].size());
    for (std::size_t i = 0; i < a["indices"].size(); ++i) {
        CHECK(a["indices"][i]["label"] == b["indices"][i]["label"]);
        CHECK(std::abs(a["indices"][i]["index"].get<double>() -
                       b["indices"][i]["index"].get<double>()) < 1e-12);
    }
    CHECK(std::abs(b["total_variance"].get<double>() -
                   100.0 * a["total_variance"].get<double>()) <
          1e-8 * a["total_variance"].get<double>() * 100.0);
}

TEST_CASE("the bench compares all three fitters on identical draws") {
    if (!have_cli()) return;
    Scratch scratch;
    nlohmann::json j = toy_config(scratch, "out_bench", 120, 4, 2, "foba");
    j["replicates"] = 2;
    write_config(scratch.path("bench.json"), j);
    const RunResult r = run_cli(scratch, "bench --config " + scratch.path("bench.json"));
    REQUIRE(r.exit_code == 0);

    const nlohmann::json bench =
        nlohmann::json::parse(slurp(scratch.dir / "out_bench" / "bench.json"));
    CHECK(bench["kind"] == "hofd_bench");
    REQUIRE(bench["rows"].size() == 3);  // 120 rows > 60 columns, so ols joins

    std::vector<std::string> methods;
    for (const auto& row : bench["rows"]) methods.push_back(row["method"].get<std::string>());
    CHECK(methods == std::vector<std::string>{"foba", "lars", "ols"});

    // Every method saw the very same input draws.
    const auto& reference = bench["rows"][0]["sample_checksums"];
    CHECK(reference.size() == 2);
    for (const auto& row : bench["rows"]) {
        CHECK(row["sample_checksums"] == reference);
        CHECK(row["support_sizes"].size() == 2);
    }

    const std::string csv = slurp(scratch.dir / "out_bench" / "bench.csv");
    CHECK(csv.rfind("method,label,mean,sd\n", 0) == 0);
    const std::string sup = slurp(scratch.dir / "out_bench" / "bench_support.csv");
    CHECK(sup.rfind("method,replicate,seed,support_size\n", 0) == 0);
}

TEST_CASE("first-order configs restrict the report to singleton labels") {
    if (!have_cli()) return;
    Scratch scratch;
    write_config(scratch.path("d1.json"), toy_config(scratch, "out_d1", 300, 3, 1, "ols"));
    REQUIRE(run_cli(scratch, "indices --config " + scratch.path("d1.json")).exit_code == 0);
    const nlohmann::json report =
        nlohmann::json::parse(slurp(scratch.dir / "out_d1" / "report.json"));
    std::vector<std::string> labels;
    for (const auto& e : report["indices"]) labels.push_back(e["label"].get<std::string>());
    CHECK(labels == std::vector<std::string>{"1", "2", "3", "rest"});
}

TEST_CASE("usage errors arrive as exit code two") {
    if (!have_cli()) return;
    Scratch scratch;
    CHECK(run_cli(scratch, "").exit_code == 2);                      // no subcommand
    CHECK(run_cli(scratch, "indices").exit_code == 2);               // missing --config
    CHECK(run_cli(scratch, "indices --config /no/such/file.json").exit_code == 2);

    // A config asking for two input sources at once is rejected up front.
    nlohmann::json j = toy_config(scratch, "out_two", 100, 2, 2, "ols");
    j["sample"] = scratch.path("whatever.csv");
    write_config(scratch.path("two.json"), j);
    const RunResult r = run_cli(scratch, "indices --config " + scratch.path("two.json"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
}
