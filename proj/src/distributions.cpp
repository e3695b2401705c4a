#include "hofd/distributions.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hofd/errors.hpp"
#include "hofd/rng.hpp"
#include "hofd/serialize.hpp"

namespace hofd {

namespace {

void require_symmetric(const Eigen::MatrixXd& A, const char* what) {
    if (A.rows() != A.cols()) {
        throw ConfigError(std::string(what) + " matrix must be square");
    }
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ConfigError(std::string(what) + " matrix is not symmetric");
    }
}

// Cholesky factor of an SPD matrix. On failure, reports the smallest leading
// minor that is not positive definite.
Eigen::MatrixXd cholesky_or_throw(const Eigen::MatrixXd& A, const char* what) {
    require_symmetric(A, what);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    for (Eigen::Index k = 1; k <= A.rows(); ++k) {
        Eigen::LLT<Eigen::MatrixXd> sub(A.topLeftCorner(k, k));
        if (sub.info() != Eigen::Success) {
            throw ConfigError(std::string(what) +
                              " matrix is not positive definite: leading minor of order " +
                              std::to_string(k) + " fails Cholesky");
        }
    }
    throw ConfigError(std::string(what) + " matrix is not positive definite");
}

Eigen::MatrixXd standard_normal_block(const PhiloxRng& rng, std::uint64_t stream,
                                      std::int64_t n, Eigen::Index p) {
    Eigen::MatrixXd Z(n, p);
    for (std::int64_t i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            Z(i, j) = rng.normal(stream, static_cast<std::uint64_t>(i) *
                                             static_cast<std::uint64_t>(p) +
                                         static_cast<std::uint64_t>(j));
        }
    }
    return Z;
}

Sample finish(Eigen::MatrixXd X, std::vector<std::string> warnings) {
    Sample s;
    s.X = std::move(X);
    s.y = Eigen::VectorXd::Zero(s.X.rows());
    s.warnings = std::move(warnings);
    s.validate();
    return s;
}

Sample gaussian_impl(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                     std::int64_t n, std::uint64_t seed, std::uint64_t stream_base) {
    if (n < 1) throw ConfigError("sample size must be positive");
    if (mean.size() != cov.rows()) {
        throw ConfigError("mean length does not match covariance dimension");
    }
    const Eigen::MatrixXd L = cholesky_or_throw(cov, "covariance");
    const PhiloxRng rng(seed);
    Eigen::MatrixXd Z = standard_normal_block(rng, stream_base + 1, n, cov.rows());
    Eigen::MatrixXd X = (Z * L.transpose()).rowwise() + mean.transpose();
    return finish(std::move(X), {});
}

Sample mixture_impl(double alpha, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                    const Eigen::MatrixXd& cov2, std::int64_t n, std::uint64_t seed,
                    std::uint64_t stream_base) {
    if (n < 1) throw ConfigError("sample size must be positive");
    if (alpha < 0.0 || alpha > 1.0) {
        throw ConfigError("mixture weight must lie in [0,1], got " + std::to_string(alpha));
    }
    if (mean.size() != cov.rows() || cov.rows() != cov2.rows()) {
        throw ConfigError("mixture component dimensions disagree");
    }
    const Eigen::MatrixXd L1 = cholesky_or_throw(cov, "first mixture covariance");
    const Eigen::MatrixXd L2 = cholesky_or_throw(cov2, "second mixture covariance");
    const PhiloxRng rng(seed);
    const Eigen::Index p = cov.rows();
    Eigen::MatrixXd Z = standard_normal_block(rng, stream_base + 1, n, p);
    Eigen::MatrixXd X(n, p);
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng.uniform(stream_base, static_cast<std::uint64_t>(i));
        const Eigen::MatrixXd& L = (u < alpha) ? L1 : L2;
        X.row(i) = (L * Z.row(i).transpose() + mean).transpose();
    }
    return finish(std::move(X), {});
}

Sample correlated_uniform_impl(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                               const Eigen::MatrixXd& spearman, std::int64_t n,
                               std::uint64_t seed, std::uint64_t stream_base) {
    if (n < 1) throw ConfigError("sample size must be positive");
    const Eigen::Index p = lower.size();
    if (upper.size() != p || spearman.rows() != p || spearman.cols() != p) {
        throw ConfigError("bounds and rank-correlation dimensions disagree");
    }
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(lower[i] < upper[i])) {
            throw ConfigError("bounds for input " + std::to_string(i + 1) +
                              " must satisfy lower < upper");
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i != j && std::abs(spearman(i, j)) >= 1.0) {
                throw ConfigError("rank correlations must lie strictly inside (-1,1)");
            }
        }
    }
    // Rank correlation of the uniforms -> Pearson correlation of the latent
    // Gaussian copula.
    Eigen::MatrixXd R(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            R(i, j) = (i == j) ? 1.0
                               : 2.0 * std::sin(std::numbers::pi * spearman(i, j) / 6.0);
        }
    }
    const Eigen::MatrixXd L = cholesky_or_throw(R, "latent copula correlation");

    std::vector<std::string> warnings;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 1e-3 * lmax) {
        std::ostringstream w;
        w << "latent correlation is nearly singular (eigenvalue ratio " << lmin / lmax
          << "); copula draws may be numerically fragile";
        warnings.push_back(w.str());
    }

    const PhiloxRng rng(seed);
    Eigen::MatrixXd Z = standard_normal_block(rng, stream_base + 1, n, p);
    Eigen::MatrixXd W = Z * L.transpose();
    Eigen::MatrixXd X(n, p);
    for (std::int64_t i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double u = detail::normal_cdf(W(i, j));
            X(i, j) = lower[j] + (upper[j] - lower[j]) * u;
        }
    }
    return finish(std::move(X), std::move(warnings));
}

}  // namespace

Sample sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       std::int64_t n, std::uint64_t seed) {
    return gaussian_impl(mean, cov, n, seed, 0);
}

Sample sample_gaussian_mixture(double alpha, const Eigen::VectorXd& mean,
                               const Eigen::MatrixXd& cov, const Eigen::MatrixXd& cov2,
                               std::int64_t n, std::uint64_t seed) {
    return mixture_impl(alpha, mean, cov, cov2, n, seed, 0);
}

Sample sample_correlated_uniform(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                 const Eigen::MatrixXd& spearman,
                                 std::int64_t n, std::uint64_t seed) {
    return correlated_uniform_impl(lower, upper, spearman, n, seed, 0);
}

Sample sample_from_spec(const InputSpec& spec, std::int64_t n, std::uint64_t seed,
                        std::uint64_t stream_base) {
    if (spec.kind == "gaussian") {
        return gaussian_impl(spec.mean, spec.cov, n, seed, stream_base);
    }
    if (spec.kind == "gaussian_mixture") {
        return mixture_impl(spec.alpha, spec.mean, spec.cov, spec.cov2, n, seed, stream_base);
    }
    if (spec.kind == "correlated_uniform") {
        return correlated_uniform_impl(spec.lower, spec.upper, spec.spearman, n, seed,
                                       stream_base);
    }
    throw ConfigError("unknown input kind '" + spec.kind + "'");
}

Sample load_sample(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sample file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("sample file '" + path + "' is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.empty()) throw DataError("sample file '" + path + "' has an empty header");
    const bool has_y = header.back() == "y";
    const std::size_t ncol = header.size();
    const std::size_t p = has_y ? ncol - 1 : ncol;
    if (p == 0) throw DataError("sample file '" + path + "' has no input columns");

    std::vector<double> flat;
    std::size_t rows = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                if (!std::isfinite(v)) {
                    throw DataError("non-finite value '" + cell + "' at " + path + ":" +
                                    std::to_string(lineno) + ", column " +
                                    header[col]);
                }
                flat.push_back(v);
            } catch (const DataError&) {
                throw;
            } catch (const std::exception&) {
                throw DataError("non-numeric value '" + cell + "' at " + path + ":" +
                                std::to_string(lineno) + ", column " +
                                (col < header.size() ? header[col] : std::to_string(col + 1)));
            }
            ++col;
        }
        if (col != ncol) {
            throw DataError("row at " + path + ":" + std::to_string(lineno) + " has " +
                            std::to_string(col) + " fields, expected " +
                            std::to_string(ncol));
        }
        ++rows;
    }

    Sample s;
    s.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    s.y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < p; ++j) s.X(i, j) = flat[i * ncol + j];
        if (has_y) s.y[static_cast<Eigen::Index>(i)] = flat[i * ncol + p];
    }
    s.has_response = has_y;
    s.validate();
    return s;
}

void save_sample(const Sample& sample, const std::string& path) {
    std::string out;
    for (Eigen::Index j = 0; j < sample.p(); ++j) {
        if (j) out += ',';
        out += "x" + std::to_string(j + 1);
    }
    if (sample.has_response) out += ",y";
    out += '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < sample.n(); ++i) {
        for (Eigen::Index j = 0; j < sample.p(); ++j) {
            if (j) out += ',';
            std::snprintf(buf, sizeof(buf), "%.17g", sample.X(i, j));
            out += buf;
        }
        if (sample.has_response) {
            out += ',';
            std::snprintf(buf, sizeof(buf), "%.17g", sample.y[i]);
            out += buf;
        }
        out += '\n';
    }
    write_text_atomic(path, out);
}

}  // namespace hofd
