#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hofd/distributions.hpp"

namespace hofd {

// Inputs assembled from independent blocks (columns concatenated in order).
// Block b draws from counter streams (2b, 2b+1) so layouts are reproducible
// and a single-block model matches the standalone samplers exactly.
struct InputModel {
    std::vector<InputSpec> blocks;

    int dimension() const;
    Sample sample(std::int64_t n, std::uint64_t seed) const;
};

// Three correlated Gaussians (sd 0.2, 0.2, 0.18; pairwise correlation 0.6)
// feeding a polynomial with a product interaction in the first two inputs:
//   y = (2x1 + 1)(3x2 + 2) + (2x2^2 + x2 + 3) + (3x3^3 + 2x3^2 + 2x3 + 1).
InputModel toy_input_model();
Eigen::VectorXd toy_response(const Eigen::MatrixXd& X);

// Eight-input mechanical test case: three rank-correlated uniform geometry
// parameters, two bivariate Gaussian-mixture material pairs, one Gaussian
// load. The response is a synthetic smooth stand-in (no external solver).
InputModel vessel_input_model();
Eigen::VectorXd vessel_response(const Eigen::MatrixXd& X);

// Lookup by name ("toy" | "vessel"); throws ConfigError on unknown names.
InputModel input_model_by_name(const std::string& name);
Eigen::VectorXd model_response(const std::string& name, const Eigen::MatrixXd& X);

}  // namespace hofd
