#pragma once

// Reference computations the tests compare the library against. Everything
// here is written from first principles (quadrature, brute-force Monte Carlo,
// dense solves) and deliberately avoids the code paths under test.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hofd/regression.hpp"
#include "hofd/subsets.hpp"

namespace oracle {

// Nodes and weights integrating E[f(Z)] for Z ~ N(0,1) exactly for
// polynomials of degree <= 2k - 1 (Golub-Welsch on the Jacobi matrix).
void gauss_hermite_rule(int k, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

// Tensor quadrature grid mapped to an arbitrary Gaussian: rows of `points`
// are x = mean + chol(cov) * z over the product rule; weights sum to one.
struct Grid {
    Eigen::MatrixXd points;
    Eigen::VectorXd weights;
};
Grid gaussian_grid(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, int nodes_per_dim);

// Weighted moments under a grid.
double integrate(const Grid& grid, const Eigen::VectorXd& f);
double inner(const Grid& grid, const Eigen::VectorXd& f, const Eigen::VectorXd& g);

// Normalized probabilists' Hermite polynomials of degrees 1..L, evaluated by
// the three-term recurrence (columns are degrees).
Eigen::MatrixXd hermite_columns(const Eigen::VectorXd& z, int L);

// The population counterpart of the hierarchical basis for Gaussian inputs:
// per-coordinate normalized Hermite systems are exactly orthonormal under
// their marginals, and each higher-order block is corrected against all
// strict-subset blocks using quadrature inner products. Values are tabulated
// on the grid, in the library's subset and multi-index ordering.
struct PopulationBasis {
    std::vector<hofd::SubsetIndex> subsets;
    std::vector<std::vector<std::vector<int>>> multi;  // per subset
    std::vector<int> offsets;                          // column offsets per subset
    int total = 0;
    Eigen::MatrixXd values;  // grid rows x total
};
PopulationBasis population_basis(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                 int L, int max_order, const Grid& grid);

// Coefficients (constant + weights) expanding f over [1, columns of B] under
// the grid measure, via a dense solve of the full normal equations.
Eigen::VectorXd project_onto(const Grid& grid, const Eigen::MatrixXd& B,
                             const Eigen::VectorXd& f, double* constant = nullptr);

// Brute-force double-loop Monte Carlo estimates of Var(E[Y | X_v]) for every
// non-empty v with |v| <= max_order, for independent standard normal inputs.
// Uses the standard-library RNG, independent of the project's generator. The
// inner-loop variance bias is removed.
std::map<std::vector<int>, double> conditional_variances(
    const std::function<double(const Eigen::VectorXd&)>& f, int p, int max_order,
    std::int64_t n_outer, int n_inner, std::uint64_t seed);

// Moebius inversion turning closed conditional variances into the variance
// of the interaction term of u (the classical unnormalized Sobol effect).
double interaction_variance(const std::map<std::vector<int>, double>& closed,
                            const std::vector<int>& u);

// Validates a forward-backward selection history: forward steps must not
// increase the loss and each recorded gain must match the bookkeeping;
// backward steps must cost less than nu times the preceding forward gain.
// Returns an empty string, or a description of the first violation.
std::string check_greedy_trace(const hofd::CoefficientVector& coef, double nu,
                               double initial_loss);

// Largest violation of the lasso stationarity conditions over the stored
// breakpoints: active columns must share correlation magnitude lambda (in
// the unit-normalized column scale), inactive ones must stay below it, and
// nonzero coefficients must carry the sign of their correlation.
double lars_kkt_violation(const hofd::DesignMatrix& design,
                          const std::vector<hofd::LarsBreakpoint>& path);

// Soft-threshold solution of the single-column lasso at penalty lambda, in
// original column scale.
double soft_threshold_solution(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                               double lambda);

// Piecewise-linear evaluation of a stored path at an arbitrary penalty.
Eigen::VectorXd path_value(const std::vector<hofd::LarsBreakpoint>& path, Eigen::Index m,
                           double lambda);

}  // namespace oracle
