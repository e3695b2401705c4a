#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace hofd {

// L basis functions for one input dimension, orthonormal against the constant
// under the empirical inner product <f,g>_n = (1/n) sum f(x_s) g(x_s).
//
// Each function is stored two ways: as its values on the construction sample
// (columns of `values`), and as a recipe for new points. The recipe is
//   phi_k(x) = transform(k, 0) + sum_j transform(k, 1 + j) * raw_j(x)
// where raw_j are the family's primitive functions (normalized recurrence
// polynomials for Hermite, Cox-de Boor splines for bspline). Ordering the
// dictionary [1, raw_0, raw_1, ...] makes the transform lower triangular in
// the retained columns, with positive pivots.
struct UnivariateSystem {
    std::string family;                      // "hermite" | "bspline"
    int degree = 0;                          // polynomial degree / spline order - 1
    Eigen::MatrixXd values;                  // n x L, empirical values
    Eigen::MatrixXd transform;               // L x (1 + raw count); column 0 = constant
    // Family parameters needed to evaluate raw functions at new points.
    double shift = 0.0;                      // hermite: sample mean
    double scale = 1.0;                      // hermite: sample sd
    std::vector<double> knots;               // bspline: full clamped knot vector

    int size() const { return static_cast<int>(values.cols()); }

    // Evaluate all L functions at new points (rows = points, cols = functions).
    Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
};

// Normalized probabilists' Hermite polynomials of the standardized variable
// (x - mean)/sd, degrees 1..L, then re-orthonormalized against the sample.
UnivariateSystem hermite_system(const Eigen::VectorXd& x, int L);

// Cubic B-splines on knots placed at empirical quantiles. The raw family has
// L+1 functions summing to one; dropping the constant direction during
// re-orthonormalization leaves L functions. degree is clamped so that at
// least one interior knot interval exists.
UnivariateSystem bspline_system(const Eigen::VectorXd& x, int L, int degree = 3);

// Modified Gram-Schmidt under <.,.>_n with one re-orthogonalization pass,
// against the constant function first and then earlier columns. Columns whose
// remaining norm falls below tol * (initial centered norm) are dropped.
// Returns the orthonormalized values; T receives the change of basis over
// the dictionary [1, raw_0, raw_1, ...] (retained rows only).
Eigen::MatrixXd empirical_orthonormalize(const Eigen::MatrixXd& raw, Eigen::MatrixXd& T,
                                         double tol = 1e-10);

// Raw family evaluators, exposed for reconstruction and tests.
Eigen::MatrixXd hermite_raw(const Eigen::VectorXd& z, int L);
Eigen::MatrixXd bspline_raw(const Eigen::VectorXd& x, const std::vector<double>& knots,
                            int degree);

}  // namespace hofd
