#include "hofd/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hofd/errors.hpp"
#include "hofd/rng.hpp"
#include "hofd/serialize.hpp"

namespace hofd {

namespace {

std::vector<int> nonzero_support(const Eigen::VectorXd& beta) {
    std::vector<int> out;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) out.push_back(static_cast<int>(j));
    }
    return out;
}

double empirical_rss(const DesignMatrix& design, const Eigen::VectorXd& beta) {
    return (design.y - design.Phi * beta).squaredNorm() / static_cast<double>(design.n());
}

// Ridge-based noise estimate with an effective-degrees-of-freedom correction:
// sigma2 = RSS / (n - sum_i e_i/(e_i + lambda)) where e_i are the squared
// singular values of the design. Works on either side of n = m.
double ridge_noise_estimate(const DesignMatrix& design, double lambda) {
    const Eigen::Index n = design.n();
    const Eigen::Index m = design.m();
    double rss = 0.0;
    double df = 0.0;
    if (n <= m) {
        const Eigen::MatrixXd M = design.Phi * design.Phi.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        const Eigen::VectorXd e = es.eigenvalues().cwiseMax(0.0);
        const Eigen::VectorXd uy = es.eigenvectors().transpose() * design.y;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double den = e[i] + lambda;
            rss += (lambda * lambda) * uy[i] * uy[i] / (den * den);
            df += e[i] / den;
        }
    } else {
        const Eigen::MatrixXd N = design.Phi.transpose() * design.Phi;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(N);
        const Eigen::VectorXd e = es.eigenvalues().cwiseMax(0.0);
        const Eigen::VectorXd w = es.eigenvectors().transpose() *
                                  (design.Phi.transpose() * design.y);
        Eigen::VectorXd scaled(m);
        for (Eigen::Index i = 0; i < m; ++i) scaled[i] = w[i] / (e[i] + lambda);
        const Eigen::VectorXd beta = es.eigenvectors() * scaled;
        rss = (design.y - design.Phi * beta).squaredNorm();
        for (Eigen::Index i = 0; i < m; ++i) df += e[i] / (e[i] + lambda);
    }
    const double dof = std::max(static_cast<double>(n) - df, 1.0);
    return rss / dof;
}

}  // namespace

void FitConfig::validate() const {
    if (method != "ols" && method != "foba" && method != "lars" && method != "ridge") {
        throw ConfigError("unknown fit method '" + method + "'");
    }
    if (!(foba_nu > 0.0 && foba_nu < 1.0)) {
        throw ConfigError("backward slack must lie in (0,1), got " + std::to_string(foba_nu));
    }
    if (foba_epsilon < 0.0) {
        throw ConfigError("forward-stop threshold must be positive (or 0 for automatic)");
    }
    if (cv_folds < 2) {
        throw ConfigError("cross-validation needs at least 2 folds");
    }
    if (ridge_lambda < 0.0) {
        throw ConfigError("ridge penalty must be non-negative");
    }
}

DesignMatrix assemble_design(const HofdBasis& basis, const Sample& sample) {
    if (!sample.has_response) {
        throw DataError("sample carries no response to regress on");
    }
    if (sample.p() != static_cast<Eigen::Index>(basis.univariate.size())) {
        throw DataError("sample has " + std::to_string(sample.p()) +
                        " inputs, basis was built for " +
                        std::to_string(basis.univariate.size()));
    }
    DesignMatrix d;
    const bool has_values = !basis.blocks.empty() && basis.blocks.front().values.rows() > 0;
    if (has_values && sample.n() == basis.sample_size &&
        matrix_checksum(sample.X) == basis.sample_checksum) {
        d.Phi = basis.values_matrix();
    } else {
        d.Phi = evaluate_basis(basis, sample.X);
    }
    d.y_mean = sample.y.mean();
    d.y = sample.y.array() - d.y_mean;
    d.labels = basis.column_labels();
    d.subsets = basis.subsets;
    d.offsets = basis.block_offsets();
    for (const auto& b : basis.blocks) d.sizes.push_back(b.size());
    return d;
}

CoefficientVector fit_ols(const DesignMatrix& design) {
    if (design.m() > design.n()) {
        throw NumericalError("ordinary least squares needs at least as many rows as columns (" +
                             std::to_string(design.n()) + " rows, " +
                             std::to_string(design.m()) +
                             " columns); use the foba or lars fitters instead");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.Phi);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.m()) {
        throw NumericalError("design is rank deficient (rank " + std::to_string(qr.rank()) +
                             " of " + std::to_string(design.m()) +
                             "); use the foba or lars fitters instead");
    }
    CoefficientVector coef;
    coef.method = "ols";
    coef.beta = qr.solve(design.y);
    coef.support = nonzero_support(coef.beta);
    coef.residual_norm2 = empirical_rss(design, coef.beta);
    return coef;
}

CoefficientVector fit_ridge(const DesignMatrix& design, double lambda) {
    if (lambda < 0.0) throw ConfigError("ridge penalty must be non-negative");
    const Eigen::MatrixXd A =
        design.Phi.transpose() * design.Phi +
        lambda * Eigen::MatrixXd::Identity(design.m(), design.m());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success || (lambda == 0.0 && !(ldlt.rcond() > 1e-14))) {
        throw NumericalError("ridge normal equations are numerically singular at penalty " +
                             std::to_string(lambda));
    }
    CoefficientVector coef;
    coef.method = "ridge";
    coef.lambda = lambda;
    coef.beta = ldlt.solve(design.Phi.transpose() * design.y);
    coef.support = nonzero_support(coef.beta);
    coef.residual_norm2 = empirical_rss(design, coef.beta);
    return coef;
}

CoefficientVector fit_foba(const DesignMatrix& design, const FitConfig& config) {
    config.validate();
    const Eigen::Index n = design.n();
    const Eigen::Index m = design.m();

    double sigma2 = config.foba_sigma2;
    if (config.foba_epsilon <= 0.0 && sigma2 < 0.0) {
        // The prefit penalty is in per-sample units.
        sigma2 = ridge_noise_estimate(design, config.ridge_lambda * static_cast<double>(n));
    }
    const double epsilon =
        config.foba_epsilon > 0.0
            ? config.foba_epsilon
            : 2.0 * sigma2 * std::log(static_cast<double>(m)) / static_cast<double>(n);

    // Everything below runs in the empirical (1/n) scale.
    const Eigen::MatrixXd G = design.Phi.transpose() * design.Phi / static_cast<double>(n);
    const Eigen::VectorXd g = design.Phi.transpose() * design.y / static_cast<double>(n);
    const double yy = design.y.squaredNorm() / static_cast<double>(n);

    CoefficientVector coef;
    coef.method = "foba";
    coef.sigma2_hat = std::max(sigma2, 0.0);
    coef.epsilon = epsilon;

    std::vector<int> active;
    Eigen::VectorXd beta_a;  // aligned with `active`
    double loss = yy;
    const int max_forward = config.foba_max_steps > 0
                                ? config.foba_max_steps
                                : static_cast<int>(std::min(n, m));

    auto refit = [&](Eigen::LLT<Eigen::MatrixXd>* keep) {
        const int k = static_cast<int>(active.size());
        Eigen::MatrixXd Gaa(k, k);
        Eigen::VectorXd ga(k);
        for (int a = 0; a < k; ++a) {
            ga[a] = g[active[static_cast<std::size_t>(a)]];
            for (int b = 0; b < k; ++b) {
                Gaa(a, b) = G(active[static_cast<std::size_t>(a)],
                              active[static_cast<std::size_t>(b)]);
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(Gaa);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("active-set normal equations lost positive definiteness");
        }
        beta_a = llt.solve(ga);
        loss = yy - ga.dot(beta_a);
        if (keep) *keep = std::move(llt);
    };

    int forward_steps = 0;
    while (forward_steps < max_forward && static_cast<Eigen::Index>(active.size()) < std::min(n, m)) {
        // Forward: exact loss decrease of adding each inactive column.
        Eigen::VectorXd c = g;
        Eigen::VectorXd d = G.diagonal();
        if (!active.empty()) {
            const int k = static_cast<int>(active.size());
            Eigen::MatrixXd Gaa(k, k);
            Eigen::MatrixXd Gam(k, m);
            for (int a = 0; a < k; ++a) {
                Gam.row(a) = G.row(active[static_cast<std::size_t>(a)]);
                for (int b = 0; b < k; ++b) {
                    Gaa(a, b) = G(active[static_cast<std::size_t>(a)],
                                  active[static_cast<std::size_t>(b)]);
                }
            }
            c -= Gam.transpose() * beta_a;
            const Eigen::MatrixXd W = Eigen::LLT<Eigen::MatrixXd>(Gaa).solve(Gam);
            d -= (Gam.cwiseProduct(W)).colwise().sum().transpose();
        }
        int best = -1;
        double best_gain = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (std::find(active.begin(), active.end(), static_cast<int>(j)) != active.end())
                continue;
            if (!(d[j] > 1e-12 * std::max(G(j, j), 1e-300))) continue;  // dependent column
            const double gain = c[j] * c[j] / d[j];
            if (gain > best_gain) {
                best_gain = gain;
                best = static_cast<int>(j);
            }
        }
        if (best < 0 || best_gain < epsilon) break;

        active.push_back(best);
        std::sort(active.begin(), active.end());
        refit(nullptr);
        ++forward_steps;
        coef.trace.push_back({"add", best, best_gain, loss,
                              static_cast<int>(active.size())});
        const double last_gain = best_gain;

        // Backward: drop columns whose removal barely raises the loss.
        while (active.size() > 1) {
            const int k = static_cast<int>(active.size());
            Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd::Identity(1, 1));
            refit(&llt);
            const Eigen::MatrixXd Ginv =
                llt.solve(Eigen::MatrixXd::Identity(k, k));
            int worst = -1;
            double smallest = std::numeric_limits<double>::infinity();
            for (int a = 0; a < k; ++a) {
                const double inc = beta_a[a] * beta_a[a] / Ginv(a, a);
                if (inc < smallest) {
                    smallest = inc;
                    worst = a;
                }
            }
            if (!(smallest < config.foba_nu * last_gain)) break;
            const int column = active[static_cast<std::size_t>(worst)];
            active.erase(active.begin() + worst);
            refit(nullptr);
            coef.trace.push_back({"remove", column, smallest, loss,
                                  static_cast<int>(active.size())});
        }
    }

    if (!active.empty()) refit(nullptr);
    coef.beta = Eigen::VectorXd::Zero(m);
    for (std::size_t a = 0; a < active.size(); ++a) {
        coef.beta[active[a]] = beta_a[static_cast<Eigen::Index>(a)];
    }
    coef.support = active;
    coef.residual_norm2 = empirical_rss(design, coef.beta);
    return coef;
}

namespace {

struct LarsPath {
    std::vector<LarsBreakpoint> breakpoints;  // lambda descending, beta standardized
    bool truncated = false;
};

// Lasso homotopy on columns already scaled to unit empirical norm. Gram and
// correlations are in the (1/n) scale, so lambda matches |<x_j, r>_n|.
LarsPath lars_path(const Eigen::MatrixXd& Gn, const Eigen::VectorXd& gn, Eigen::Index n,
                   int max_steps) {
    const Eigen::Index m = gn.size();
    LarsPath path;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    std::vector<int> active;
    std::vector<int> sign;

    Eigen::VectorXd c = gn;  // correlations with the residual
    Eigen::Index first = 0;
    double lambda = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        if (std::abs(c[j]) > lambda) {
            lambda = std::abs(c[j]);
            first = j;
        }
    }
    if (!(lambda > 0.0)) {
        path.breakpoints.push_back({0.0, beta, {}, -1});
        return path;
    }
    active.push_back(static_cast<int>(first));
    sign.push_back(c[first] > 0.0 ? 1 : -1);
    path.breakpoints.push_back({lambda, beta, active, -1});

    const double lambda_floor = 1e-12 * lambda;
    int steps = 0;
    while (lambda > lambda_floor) {
        if (++steps > max_steps) {
            path.truncated = true;
            break;
        }
        const int k = static_cast<int>(active.size());
        Eigen::MatrixXd Gaa(k, k);
        Eigen::VectorXd s(k);
        for (int a = 0; a < k; ++a) {
            s[a] = sign[static_cast<std::size_t>(a)];
            for (int b = 0; b < k; ++b) {
                Gaa(a, b) = Gn(active[static_cast<std::size_t>(a)],
                               active[static_cast<std::size_t>(b)]);
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(Gaa);
        if (llt.info() != Eigen::Success) {
            path.truncated = true;
            break;
        }
        const Eigen::VectorXd w = llt.solve(s);  // d(beta_A)/d(-lambda)
        Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
        for (int b = 0; b < k; ++b) {
            a += w[b] * Gn.col(active[static_cast<std::size_t>(b)]);
        }

        // Smallest positive step to the next event.
        double gamma = lambda;  // default: ride to lambda = 0
        int join = -1;
        int drop = -1;
        const double tol = 1e-12 * std::max(lambda, 1.0);
        for (Eigen::Index j = 0; j < m; ++j) {
            if (std::find(active.begin(), active.end(), static_cast<int>(j)) != active.end())
                continue;
            const double d_plus = 1.0 - a[j];
            const double d_minus = 1.0 + a[j];
            if (d_plus > 1e-14) {
                const double g = (lambda - c[j]) / d_plus;
                if (g > tol && g < gamma - tol) {
                    gamma = g;
                    join = static_cast<int>(j);
                }
            }
            if (d_minus > 1e-14) {
                const double g = (lambda + c[j]) / d_minus;
                if (g > tol && g < gamma - tol) {
                    gamma = g;
                    join = static_cast<int>(j);
                }
            }
        }
        for (int b = 0; b < k; ++b) {
            if (w[b] == 0.0) continue;
            const double g = -beta[active[static_cast<std::size_t>(b)]] / w[b];
            if (g > tol && g < gamma - tol) {
                gamma = g;
                drop = b;
                join = -1;
            }
        }

        for (int b = 0; b < k; ++b) beta[active[static_cast<std::size_t>(b)]] += gamma * w[b];
        c -= gamma * a;
        lambda -= gamma;

        int dropped_column = -1;
        if (drop >= 0) {
            // Lasso modification: a coefficient crossed zero, so the column
            // leaves the active set.
            dropped_column = active[static_cast<std::size_t>(drop)];
            beta[dropped_column] = 0.0;
            active.erase(active.begin() + drop);
            sign.erase(sign.begin() + drop);
        } else if (join >= 0) {
            active.push_back(join);
            sign.push_back(c[join] > 0.0 ? 1 : -1);
        }
        path.breakpoints.push_back({std::max(lambda, 0.0), beta, active, dropped_column});

        if (drop < 0 && join < 0) break;  // rode to zero: path complete
    }
    return path;
}

// Piecewise-linear interpolation of the path at `lambda` (beta is linear in
// lambda between breakpoints).
Eigen::VectorXd path_at(const std::vector<LarsBreakpoint>& bp, Eigen::Index m, double lambda) {
    if (bp.empty()) return Eigen::VectorXd::Zero(m);
    if (lambda >= bp.front().lambda) return Eigen::VectorXd::Zero(m);
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (lambda >= bp[i].lambda) {
            const double span = bp[i - 1].lambda - bp[i].lambda;
            if (span <= 0.0) return bp[i].beta;
            const double w = (bp[i - 1].lambda - lambda) / span;
            return bp[i - 1].beta + w * (bp[i].beta - bp[i - 1].beta);
        }
    }
    return bp.back().beta;
}

}  // namespace

CoefficientVector fit_lars(const DesignMatrix& design, const FitConfig& config) {
    config.validate();
    const Eigen::Index n = design.n();
    const Eigen::Index m = design.m();
    const int max_steps = config.lars_max_steps > 0
                              ? config.lars_max_steps
                              : 8 * static_cast<int>(std::min(n, m));

    // Scale columns to unit empirical norm; undone on output.
    Eigen::VectorXd scale(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        scale[j] = design.Phi.col(j).norm() / std::sqrt(static_cast<double>(n));
        if (!(scale[j] > 0.0)) {
            throw NumericalError("design column " + std::to_string(j + 1) +
                                 " is identically zero");
        }
    }
    const Eigen::MatrixXd Xs = design.Phi * scale.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd Gn = Xs.transpose() * Xs / static_cast<double>(n);
    const Eigen::VectorXd gn = Xs.transpose() * design.y / static_cast<double>(n);

    LarsPath full = lars_path(Gn, gn, n, max_steps);

    CoefficientVector coef;
    coef.method = "lars";
    coef.path_truncated = full.truncated;

    // Candidate penalties: the full path's breakpoints.
    std::vector<double> grid;
    for (const auto& bp : full.breakpoints) grid.push_back(bp.lambda);

    double best_lambda = grid.back();
    if (static_cast<int>(config.cv_folds) <= static_cast<int>(n) && grid.size() > 1) {
        // Seeded shuffle -> round-robin folds.
        const PhiloxRng rng(config.cv_seed);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            const double ua = rng.uniform(2, static_cast<std::uint64_t>(a));
            const double ub = rng.uniform(2, static_cast<std::uint64_t>(b));
            return ua < ub || (ua == ub && a < b);
        });
        const int folds = config.cv_folds;
        std::vector<int> fold_of(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < order.size(); ++i) {
            fold_of[static_cast<std::size_t>(order[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));
        }

        Eigen::VectorXd cv_err = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
        for (int f = 0; f < folds; ++f) {
            std::vector<Eigen::Index> train, test;
            for (Eigen::Index i = 0; i < n; ++i) {
                (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
            }
            if (train.empty() || test.empty()) continue;
            Eigen::MatrixXd Xtr(static_cast<Eigen::Index>(train.size()), m);
            Eigen::VectorXd ytr(static_cast<Eigen::Index>(train.size()));
            for (std::size_t i = 0; i < train.size(); ++i) {
                Xtr.row(static_cast<Eigen::Index>(i)) = Xs.row(train[i]);
                ytr[static_cast<Eigen::Index>(i)] = design.y[train[i]];
            }
            const Eigen::Index ntr = Xtr.rows();
            const Eigen::MatrixXd Gtr = Xtr.transpose() * Xtr / static_cast<double>(ntr);
            const Eigen::VectorXd gtr = Xtr.transpose() * ytr / static_cast<double>(ntr);
            LarsPath sub = lars_path(Gtr, gtr, ntr, max_steps);
            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                const Eigen::VectorXd b = path_at(sub.breakpoints, m, grid[gi]);
                double err = 0.0;
                for (Eigen::Index t : test) {
                    const double r = design.y[t] - Xs.row(t).dot(b);
                    err += r * r;
                }
                cv_err[static_cast<Eigen::Index>(gi)] += err;
            }
        }
        cv_err /= static_cast<double>(n);

        // Smallest CV error; ties resolve toward the sparser (larger lambda) end.
        Eigen::Index best_i = 0;
        for (Eigen::Index i = 1; i < cv_err.size(); ++i) {
            if (cv_err[i] < cv_err[best_i] - 1e-15) best_i = i;
        }
        best_lambda = grid[static_cast<std::size_t>(best_i)];
        coef.cv_lambda_grid = grid;
        coef.cv_mse.assign(cv_err.data(), cv_err.data() + cv_err.size());
    }

    coef.lambda = best_lambda;
    const Eigen::VectorXd beta_std = path_at(full.breakpoints, m, best_lambda);
    coef.beta = beta_std.cwiseQuotient(scale);
    coef.support = nonzero_support(coef.beta);
    coef.residual_norm2 = empirical_rss(design, coef.beta);

    // Report the path in the original column scale.
    coef.path.reserve(full.breakpoints.size());
    for (const auto& bp : full.breakpoints) {
        LarsBreakpoint out = bp;
        out.beta = bp.beta.cwiseQuotient(scale);
        std::sort(out.active.begin(), out.active.end());
        coef.path.push_back(std::move(out));
    }
    return coef;
}

CoefficientVector fit(const DesignMatrix& design, const FitConfig& config) {
    config.validate();
    if (config.method == "ols") return fit_ols(design);
    if (config.method == "foba") return fit_foba(design, config);
    if (config.method == "lars") return fit_lars(design, config);
    return fit_ridge(design, config.ridge_lambda);
}

}  // namespace hofd
