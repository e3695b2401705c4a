#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hofd {

// A dataset: n rows of p inputs, plus an optional response column.
// Responses are zero until a model or a file attaches them.
struct Sample {
    Eigen::MatrixXd X;                  // n x p
    Eigen::VectorXd y;                  // n (zero-filled when absent)
    bool has_response = false;
    std::vector<std::string> warnings;  // non-fatal diagnostics gathered while sampling

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }

    // Checks the structural invariants shared by every sampler and loader:
    // all entries finite, at least two rows, and no constant input column.
    // Throws DataError on violation.
    void validate() const;
};

}  // namespace hofd
