#include "hofd/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hofd/errors.hpp"

namespace hofd {

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            M(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
        }
    }
    return M;
}

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t matrix_checksum(const Eigen::MatrixXd& M) {
    std::uint64_t h = fnv1a(M.data(), static_cast<std::size_t>(M.size()) * sizeof(double));
    const std::int64_t dims[2] = {M.rows(), M.cols()};
    h ^= fnv1a(dims, sizeof(dims));
    return h;
}

nlohmann::json basis_to_json(const HofdBasis& basis) {
    nlohmann::json j;
    j["kind"] = "hofd_basis";
    j["family"] = basis.config.family;
    j["levels"] = basis.config.levels;
    j["max_order"] = basis.config.max_order;
    j["spline_degree"] = basis.config.spline_degree;
    j["sample_size"] = basis.sample_size;
    // hex string: JSON numbers cannot carry 64 checksum bits exactly
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(basis.sample_checksum));
    j["sample_checksum"] = buf;

    nlohmann::json systems = nlohmann::json::array();
    for (const auto& sys : basis.univariate) {
        nlohmann::json s;
        s["family"] = sys.family;
        s["degree"] = sys.degree;
        s["shift"] = sys.shift;
        s["scale"] = sys.scale;
        s["knots"] = sys.knots;
        s["transform"] = matrix_to_json(sys.transform);
        systems.push_back(std::move(s));
    }
    j["univariate"] = std::move(systems);

    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : basis.blocks) {
        nlohmann::json jb;
        jb["subset"] = b.subset.vars;
        jb["multi_indices"] = b.multi_indices;
        jb["expansion"] = matrix_to_json(b.expansion);
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    return j;
}

HofdBasis basis_from_json(const nlohmann::json& j) {
    if (!j.contains("kind") || j["kind"] != "hofd_basis") {
        throw DataError("not a basis bundle");
    }
    HofdBasis basis;
    basis.config.family = j["family"].get<std::string>();
    basis.config.levels = j["levels"].get<std::vector<int>>();
    basis.config.max_order = j["max_order"].get<int>();
    basis.config.spline_degree = j["spline_degree"].get<int>();
    basis.sample_size = j["sample_size"].get<Eigen::Index>();
    basis.sample_checksum =
        std::stoull(j["sample_checksum"].get<std::string>(), nullptr, 16);

    for (const auto& s : j["univariate"]) {
        UnivariateSystem sys;
        sys.family = s["family"].get<std::string>();
        sys.degree = s["degree"].get<int>();
        sys.shift = s["shift"].get<double>();
        sys.scale = s["scale"].get<double>();
        sys.knots = s["knots"].get<std::vector<double>>();
        sys.transform = matrix_from_json(s["transform"]);
        basis.univariate.push_back(std::move(sys));
    }

    for (const auto& jb : j["blocks"]) {
        SubsetBlock b;
        b.subset.vars = jb["subset"].get<std::vector<int>>();
        b.multi_indices = jb["multi_indices"].get<std::vector<std::vector<int>>>();
        b.expansion = matrix_from_json(jb["expansion"]);
        // sampled values are not persisted; evaluation rebuilds them
        b.values.resize(0, static_cast<Eigen::Index>(b.multi_indices.size()));
        basis.subsets.push_back(b.subset);
        basis.blocks.push_back(std::move(b));
    }
    return basis;
}

nlohmann::json fit_to_json(const CoefficientVector& coef, const DesignMatrix& design) {
    nlohmann::json j;
    j["kind"] = "hofd_fit";
    j["method"] = coef.method;
    j["residual_norm2"] = coef.residual_norm2;
    j["support_size"] = coef.support.size();

    nlohmann::json support = nlohmann::json::array();
    for (int s : coef.support) {
        nlohmann::json e;
        e["column"] = s;
        e["label"] = design.labels[static_cast<std::size_t>(s)];
        e["beta"] = coef.beta[s];
        support.push_back(std::move(e));
    }
    j["support"] = std::move(support);
    j["beta"] = vector_to_json(coef.beta);
    j["y_mean"] = design.y_mean;

    const GramMatrix gram = gram_matrix(design.Phi);
    nlohmann::json dj;
    dj["rows"] = design.n();
    dj["columns"] = design.m();
    dj["gram_rcond"] = gram.rcond;
    dj["gram_ill_conditioned"] = gram.ill_conditioned;
    j["design"] = std::move(dj);

    if (coef.method == "foba") {
        j["sigma2_hat"] = coef.sigma2_hat;
        j["epsilon"] = coef.epsilon;
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& ev : coef.trace) {
            nlohmann::json e;
            e["action"] = ev.action;
            e["column"] = ev.column;
            e["delta"] = ev.delta;
            e["loss"] = ev.loss;
            e["support_size"] = ev.support_size;
            trace.push_back(std::move(e));
        }
        j["trace"] = std::move(trace);
    }
    if (coef.method == "lars") {
        j["lambda"] = coef.lambda;
        j["path_truncated"] = coef.path_truncated;
        nlohmann::json path = nlohmann::json::array();
        for (const auto& bp : coef.path) {
            nlohmann::json e;
            e["lambda"] = bp.lambda;
            e["active_size"] = bp.active.size();
            if (bp.dropped >= 0) e["dropped"] = bp.dropped;
            path.push_back(std::move(e));
        }
        j["path"] = std::move(path);
        j["cv_lambda_grid"] = coef.cv_lambda_grid;
        j["cv_mse"] = coef.cv_mse;
    }
    if (coef.method == "ridge") j["lambda"] = coef.lambda;
    return j;
}

nlohmann::json report_to_json(const SensitivityReport& report) {
    nlohmann::json j;
    j["kind"] = "hofd_report";
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json je;
        je["label"] = e.label;
        je["index"] = e.index;
        je["var_part"] = e.var_part;
        je["cov_part"] = e.cov_part;
        entries.push_back(std::move(je));
    }
    j["indices"] = std::move(entries);
    j["total_variance"] = report.total_variance;
    j["sum"] = report.sum;
    j["component_cov"] = matrix_to_json(report.component_cov);
    j["cov_labels"] = report.cov_labels;
    j["n"] = report.n;
    j["method"] = report.method;
    j["seed"] = report.seed;
    return j;
}

std::string report_to_csv(const SensitivityReport& report) {
    std::string out = "label,index,var_part,cov_part\n";
    for (const auto& e : report.entries) {
        out += e.label + ',' + format_g17(e.index) + ',' + format_g17(e.var_part) + ',' +
               format_g17(e.cov_part) + '\n';
    }
    return out;
}

std::string replicate_summary_to_csv(const ReplicateSummary& summary) {
    std::string out = "label,mean,sd,q25,median,q75\n";
    for (std::size_t i = 0; i < summary.labels.size(); ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        out += summary.labels[i] + ',' + format_g17(summary.mean[j]) + ',' +
               format_g17(summary.sd[j]) + ',' + format_g17(summary.q25[j]) + ',' +
               format_g17(summary.median[j]) + ',' + format_g17(summary.q75[j]) + '\n';
    }
    return out;
}

nlohmann::json replicate_summary_to_json(const ReplicateSummary& summary) {
    nlohmann::json j;
    j["kind"] = "hofd_replicates";
    j["labels"] = summary.labels;
    j["requested"] = summary.requested;
    j["failed"] = summary.failed;
    j["failures"] = summary.failure_messages;
    j["seeds"] = summary.seeds;
    j["mean"] = vector_to_json(summary.mean);
    j["sd"] = vector_to_json(summary.sd);
    j["q25"] = vector_to_json(summary.q25);
    j["median"] = vector_to_json(summary.median);
    j["q75"] = vector_to_json(summary.q75);
    j["draws"] = matrix_to_json(summary.draws);
    return j;
}

std::string boxplot_csv(const ReplicateSummary& summary) {
    std::string out = "label,replicate,seed,value\n";
    for (std::size_t i = 0; i < summary.labels.size(); ++i) {
        for (Eigen::Index r = 0; r < summary.draws.rows(); ++r) {
            out += summary.labels[i] + ',' + std::to_string(r + 1) + ',' +
                   std::to_string(summary.seeds[static_cast<std::size_t>(r)]) + ',' +
                   format_g17(summary.draws(r, static_cast<Eigen::Index>(i))) + '\n';
        }
    }
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw DataError("cannot create directory " + target.parent_path().string());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw DataError("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw DataError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string to_stable_string(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

}  // namespace hofd
