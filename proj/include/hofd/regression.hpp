#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hofd/hogs.hpp"
#include "hofd/types.hpp"

namespace hofd {

// Design over the hierarchical basis: columns grouped by subset block in
// canonical order, response centered.
struct DesignMatrix {
    Eigen::MatrixXd Phi;               // n x m
    Eigen::VectorXd y;                 // centered response
    double y_mean = 0.0;
    std::vector<std::string> labels;   // per-column, "subset:multi-index"
    std::vector<SubsetIndex> subsets;  // block structure
    std::vector<int> offsets;
    std::vector<int> sizes;

    Eigen::Index n() const { return Phi.rows(); }
    Eigen::Index m() const { return Phi.cols(); }
};

struct FitConfig {
    std::string method = "foba";  // ols | foba | lars | ridge
    // FoBa
    double foba_nu = 0.5;         // backward slack, in (0,1)
    double foba_epsilon = 0.0;    // forward-stop; <= 0 selects 2*sigma2*log(m)/n
    double foba_sigma2 = -1.0;    // noise estimate; < 0 triggers a ridge prefit
    int foba_max_steps = 0;       // 0 = min(n, m)
    // LARS
    int lars_max_steps = 0;       // 0 = 8 * min(n, m)
    int cv_folds = 5;
    std::uint64_t cv_seed = 0;
    // ridge penalty; the FoBa noise prefit applies it in per-sample units
    double ridge_lambda = 0.3;

    void validate() const;  // throws ConfigError
};

struct FitTraceEvent {
    std::string action;  // "add" | "remove"
    int column = -1;
    double delta = 0.0;  // forward: loss decrease; backward: loss increase
    double loss = 0.0;   // empirical squared-residual after the step
    int support_size = 0;
};

struct LarsBreakpoint {
    double lambda = 0.0;
    Eigen::VectorXd beta;      // original column scale
    std::vector<int> active;   // ascending
    int dropped = -1;          // column whose coefficient hit zero here, if any
};

struct CoefficientVector {
    Eigen::VectorXd beta;
    std::string method;
    std::vector<int> support;      // nonzero columns, ascending
    double residual_norm2 = 0.0;   // (1/n) ||y - Phi beta||^2
    double sigma2_hat = 0.0;       // noise estimate behind the FoBa threshold
    double epsilon = 0.0;          // FoBa forward-stop actually applied
    double lambda = 0.0;           // LARS: CV choice; ridge: penalty
    std::vector<FitTraceEvent> trace;   // FoBa selection history
    std::vector<LarsBreakpoint> path;   // LARS breakpoints, lambda descending
    bool path_truncated = false;
    std::vector<double> cv_lambda_grid;  // LARS cross-validation diagnostics
    std::vector<double> cv_mse;
};

// Columns are the basis functions evaluated at the sample; when the sample is
// the one the basis was built on (matched by size and checksum) the stored
// values are reused instead of re-evaluated.
DesignMatrix assemble_design(const HofdBasis& basis, const Sample& sample);

// beta = (Phi'Phi)^-1 Phi'y via column-pivoted QR. Requires m <= n and a
// numerically full-rank design; otherwise throws NumericalError suggesting
// the sparse fitters.
CoefficientVector fit_ols(const DesignMatrix& design);

// Adaptive forward-backward greedy selection. Forward steps add the column
// giving the largest loss decrease (exact, via Gram updates) and stop when
// that decrease falls below epsilon; after each forward step, columns whose
// removal would raise the loss by less than nu times the last forward gain
// are deleted. Ties break toward the lowest column index.
CoefficientVector fit_foba(const DesignMatrix& design, const FitConfig& config);

// Lasso solution path by the least-angle homotopy with sign-crossing drops,
// on internally unit-normalized columns (undone on output). The returned
// coefficient is the path point minimizing k-fold cross-validated MSE.
CoefficientVector fit_lars(const DesignMatrix& design, const FitConfig& config);

CoefficientVector fit_ridge(const DesignMatrix& design, double lambda);

// Dispatch on config.method.
CoefficientVector fit(const DesignMatrix& design, const FitConfig& config);

}  // namespace hofd
