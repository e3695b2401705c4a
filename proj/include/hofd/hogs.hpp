#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hofd/basis.hpp"
#include "hofd/subsets.hpp"

namespace hofd {

struct HogsConfig {
    std::string family = "hermite";  // "hermite" | "bspline"
    std::vector<int> levels;         // functions per input (size p, or size 1 = broadcast)
    int max_order = 2;               // largest interaction cardinality
    int spline_degree = 3;

    std::vector<int> resolved_levels(int p) const;
};

// One subset's slice of the hierarchical basis.
struct SubsetBlock {
    SubsetIndex subset;
    // Degree multi-indices into the univariate systems (0-based), odometer
    // order: first coordinate most significant, last varies fastest.
    std::vector<std::vector<int>> multi_indices;
    // Values on the construction sample, n x m_u.
    Eigen::MatrixXd values;
    // Flat coefficients over the global tensor dictionary (constant column
    // first, then every enumerated subset's tensor atoms), m_u x (1 + T).
    // Used to evaluate the functions away from the construction sample.
    Eigen::MatrixXd expansion;
    // Correction weights on the stacked strict-subset functions, S x m_u
    // (0 x m_u for singletons, which need no correction). Under independent
    // inputs these converge to zero as the sample grows.
    Eigen::MatrixXd correction;
    // Per-function constant that zeroes the empirical mean.
    Eigen::VectorXd centering;

    int size() const { return static_cast<int>(values.cols()); }
};

struct HofdBasis {
    HogsConfig config;
    std::vector<UnivariateSystem> univariate;  // one system per input
    std::vector<SubsetIndex> subsets;
    std::vector<SubsetBlock> blocks;           // aligned with subsets
    Eigen::Index sample_size = 0;
    std::uint64_t sample_checksum = 0;         // FNV-1a over the raw bytes of X

    int total_functions() const;
    // Offsets of each block inside the concatenated function list.
    std::vector<int> block_offsets() const;
    // Concatenated sampled values, n x m (column order = canonical subset order).
    Eigen::MatrixXd values_matrix() const;
    // Human-readable column labels, e.g. "1:3", "1.2:2.1".
    std::vector<std::string> column_labels() const;
};

struct GramMatrix {
    Eigen::MatrixXd G;   // (1/n) * Phi^T Phi
    double rcond = 0.0;  // reciprocal condition estimate from an LDLT of G
    bool ill_conditioned = false;
};

// Build the hierarchical basis on the given inputs. For each subset u in
// canonical order the tensor products of univariate functions are corrected
// by linear combinations of all strict-subset functions and a constant so
// that every resulting function is empirically orthogonal to the constant
// and to every function of every strict subset. The correction weights solve
// a per-subset normal system assembled from empirical inner products; that
// system being numerically singular is a hard error.
HofdBasis build_hogs_basis(const Eigen::MatrixXd& X, const HogsConfig& config);

// Evaluate every basis function at new points: n_new x m.
Eigen::MatrixXd evaluate_basis(const HofdBasis& basis, const Eigen::MatrixXd& Xnew);

// Largest absolute empirical inner product between any function of a subset
// and any function of a strict subset (the constant included), measured on
// the construction sample.
double check_hierarchical_orthogonality(const HofdBasis& basis);

// Same check on out-of-sample points (the empirical identities only hold on
// the construction sample; this measures population-level decay).
double check_hierarchical_orthogonality(const HofdBasis& basis, const Eigen::MatrixXd& X);

// Gram of a design under the empirical inner product, with a condition
// estimate. `require_invertible` escalates ill-conditioning to an error.
GramMatrix gram_matrix(const Eigen::MatrixXd& design, bool require_invertible = false);

}  // namespace hofd
