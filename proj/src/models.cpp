#include "hofd/models.hpp"

#include "hofd/errors.hpp"

namespace hofd {

int InputModel::dimension() const {
    int p = 0;
    for (const auto& b : blocks) {
        if (b.kind == "gaussian" || b.kind == "gaussian_mixture") {
            p += static_cast<int>(b.mean.size());
        } else if (b.kind == "correlated_uniform") {
            p += static_cast<int>(b.lower.size());
        } else {
            throw ConfigError("unknown input kind '" + b.kind + "'");
        }
    }
    return p;
}

Sample InputModel::sample(std::int64_t n, std::uint64_t seed) const {
    if (blocks.empty()) throw ConfigError("input model has no blocks");
    Sample out;
    out.X.resize(n, dimension());
    Eigen::Index at = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        Sample part = sample_from_spec(blocks[b], n, seed, 2 * static_cast<std::uint64_t>(b));
        out.X.middleCols(at, part.p()) = part.X;
        at += part.p();
        for (auto& w : part.warnings) out.warnings.push_back(std::move(w));
    }
    out.y = Eigen::VectorXd::Zero(n);
    out.validate();
    return out;
}

InputModel toy_input_model() {
    const double s1 = 0.2, s2 = 0.2, s3 = 0.18, gamma = 0.6;
    InputSpec spec;
    spec.kind = "gaussian";
    spec.mean = Eigen::VectorXd::Zero(3);
    spec.cov.resize(3, 3);
    spec.cov << s1 * s1, gamma * s1 * s2, 0.0,
                gamma * s1 * s2, s2 * s2, 0.0,
                0.0, 0.0, s3 * s3;
    return InputModel{{spec}};
}

Eigen::VectorXd toy_response(const Eigen::MatrixXd& X) {
    if (X.cols() != 3) throw DataError("toy model expects 3 inputs");
    const auto x1 = X.col(0).array();
    const auto x2 = X.col(1).array();
    const auto x3 = X.col(2).array();
    return ((2.0 * x1 + 1.0) * (3.0 * x2 + 2.0) +
            (2.0 * x2.square() + x2 + 3.0) +
            (3.0 * x3.cube() + 2.0 * x3.square() + 2.0 * x3 + 1.0))
        .matrix();
}

InputModel vessel_input_model() {
    InputModel model;

    InputSpec geom;  // internal radius, shell thickness, cap thickness
    geom.kind = "correlated_uniform";
    geom.lower = Eigen::Vector3d(1800.0, 360.0, 180.0);
    geom.upper = Eigen::Vector3d(2200.0, 440.0, 220.0);
    geom.spearman.resize(3, 3);
    geom.spearman << 1.0, 0.85, 0.3,
                     0.85, 1.0, 0.3,
                     0.3, 0.3, 1.0;
    model.blocks.push_back(std::move(geom));

    InputSpec cap;  // cap Young's modulus and yield strength
    cap.kind = "gaussian_mixture";
    cap.alpha = 0.02;
    cap.mean = Eigen::Vector2d(210.0, 500.0);
    cap.cov.resize(2, 2);
    cap.cov << 350.0, 0.0, 0.0, 29.0;
    cap.cov2.resize(2, 2);
    cap.cov2 << 175.0, 81.0, 81.0, 417.0;
    model.blocks.push_back(std::move(cap));

    InputSpec shell;  // shell Young's modulus and yield strength
    shell.kind = "gaussian_mixture";
    shell.alpha = 0.02;
    shell.mean = Eigen::Vector2d(70.0, 300.0);
    shell.cov.resize(2, 2);
    shell.cov << 117.0, 0.0, 0.0, 500.0;
    shell.cov2.resize(2, 2);
    shell.cov2 << 58.0, 37.0, 37.0, 250.0;
    model.blocks.push_back(std::move(shell));

    InputSpec pressure;  // internal pressure
    pressure.kind = "gaussian";
    pressure.mean = Eigen::VectorXd::Constant(1, 80.0);
    pressure.cov = Eigen::MatrixXd::Constant(1, 1, 100.0);  // sd 10
    model.blocks.push_back(std::move(pressure));

    return model;
}

Eigen::VectorXd vessel_response(const Eigen::MatrixXd& X) {
    if (X.cols() != 8) throw DataError("vessel model expects 8 inputs");
    // Synthetic smooth stand-in for the finite-element stress criterion:
    // thin-shell hoop stress over yield margins plus mild stiffness terms.
    // Columns: r_int, t_shell, t_cap, e_cap, sy_cap, e_shell, sy_shell, p_int.
    const auto r = X.col(0).array();
    const auto ts = X.col(1).array();
    const auto tc = X.col(2).array();
    const auto ec = X.col(3).array();
    const auto syc = X.col(4).array();
    const auto es = X.col(5).array();
    const auto sys = X.col(6).array();
    const auto p = X.col(7).array();
    const auto hoop_shell = p * r / (ts * sys);
    const auto hoop_cap = p * r / (2.0 * tc * syc);
    return (hoop_shell + 0.6 * hoop_cap + 0.05 * (es / 70.0 - 1.0).square() -
            0.03 * (ec / 210.0 - 1.0) + 0.02 * (r / 2000.0) * (es / 70.0 - 1.0))
        .matrix();
}

InputModel input_model_by_name(const std::string& name) {
    if (name == "toy") return toy_input_model();
    if (name == "vessel") return vessel_input_model();
    throw ConfigError("unknown model '" + name + "'; available: toy, vessel");
}

Eigen::VectorXd model_response(const std::string& name, const Eigen::MatrixXd& X) {
    if (name == "toy") return toy_response(X);
    if (name == "vessel") return vessel_response(X);
    throw ConfigError("unknown model '" + name + "'; available: toy, vessel");
}

}  // namespace hofd
