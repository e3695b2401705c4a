#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hofd/regression.hpp"

namespace hofd {

// Fitted component functions evaluated on the sample, one column per subset,
// plus the residual pseudo-component that closes the decomposition of the
// centered response.
struct ComponentSet {
    std::vector<SubsetIndex> subsets;
    std::vector<std::string> labels;  // subset labels, then "rest"
    Eigen::MatrixXd values;           // n x (#subsets + 1), last column = rest
    Eigen::VectorXd y;                // centered response

    Eigen::Index n() const { return values.rows(); }
    int count() const { return static_cast<int>(values.cols()); }
};

struct IndexEntry {
    std::string label;      // "1", "1.2", ..., "rest"
    double index = 0.0;     // covariance with the response over its variance
    double var_part = 0.0;  // own-variance share
    double cov_part = 0.0;  // index minus var_part
};

struct SensitivityReport {
    std::vector<IndexEntry> entries;
    double total_variance = 0.0;  // biased (1/n) variance of the centered response
    double sum = 0.0;             // of all indices; 1 up to rounding
    Eigen::MatrixXd component_cov;        // pairwise component covariances
    std::vector<std::string> cov_labels;  // row/col labels of component_cov
    // provenance
    std::int64_t n = 0;
    std::string method;
    std::uint64_t seed = 0;
};

// Per-subset eta_u = Phi_u * beta_u on the sample; residual = y - sum eta_u.
ComponentSet reconstruct_components(const DesignMatrix& design,
                                    const CoefficientVector& coef);

// S_u = Cov_n(eta_u, y) / Var_n(y); the residual entry makes the indices sum
// to one exactly. var/cov split and the pairwise covariance table included.
SensitivityReport estimate_indices(const ComponentSet& components);

struct ReplicateSummary {
    std::vector<std::string> labels;
    Eigen::MatrixXd draws;  // successes x indices, one row per replicate
    Eigen::VectorXd mean, sd, q25, median, q75;
    std::vector<std::uint64_t> seeds;      // of the successful replicates
    int requested = 0;
    int failed = 0;
    std::vector<std::string> failure_messages;
};

// Runs `pipeline` once per seed (in parallel up to `jobs` threads) and
// aggregates the reported indices. A throwing replicate is recorded and
// skipped; the summary covers the survivors.
ReplicateSummary replicate(const std::function<SensitivityReport(std::uint64_t)>& pipeline,
                           const std::vector<std::uint64_t>& seeds, int jobs = 1);

}  // namespace hofd
