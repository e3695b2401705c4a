#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "hofd/types.hpp"

namespace hofd {

// Declarative description of an input law, used by configs and serialization.
// kind selects which fields are meaningful:
//   "gaussian"          : mean, cov
//   "gaussian_mixture"  : alpha, mean (mu shared), cov (first component), cov2
//   "correlated_uniform": lower, upper, spearman
struct InputSpec {
    std::string kind;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd cov2;
    double alpha = 1.0;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::MatrixXd spearman;
};

// Draw n rows from N(mean, cov). cov must be symmetric positive definite.
Sample sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       std::int64_t n, std::uint64_t seed);

// Two-component location mixture alpha*N(mean, cov) + (1-alpha)*N(mean, cov2).
// Component choice consumes one uniform per row from a dedicated stream, so
// alpha == 1 reproduces sample_gaussian bit for bit.
Sample sample_gaussian_mixture(double alpha, const Eigen::VectorXd& mean,
                               const Eigen::MatrixXd& cov, const Eigen::MatrixXd& cov2,
                               std::int64_t n, std::uint64_t seed);

// Margins U[lower_i, upper_i] coupled by a Gaussian copula whose latent Pearson
// correlation is 2*sin(pi*rho_S/6) applied entrywise to the Spearman matrix.
Sample sample_correlated_uniform(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                 const Eigen::MatrixXd& spearman,
                                 std::int64_t n, std::uint64_t seed);

// Dispatch on spec.kind. stream_base picks the pair of counter streams
// (stream_base = selection uniforms, stream_base + 1 = normals) so multiple
// blocks drawn under one seed stay independent.
Sample sample_from_spec(const InputSpec& spec, std::int64_t n, std::uint64_t seed,
                        std::uint64_t stream_base = 0);

// Read a numeric CSV with a single header row: columns x1..xp[,y].
// A trailing "y" column (exact name) becomes the response.
Sample load_sample(const std::string& path);

// Write a sample in the same layout load_sample expects.
void save_sample(const Sample& sample, const std::string& path);

}  // namespace hofd
