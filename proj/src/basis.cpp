#include "hofd/basis.hpp"

#include <algorithm>
#include <cmath>

#include "hofd/errors.hpp"

namespace hofd {

namespace {

double empirical_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.dot(b) / static_cast<double>(a.size());
}

// Largest knot-span index whose half-open interval contains x, with the
// right boundary folded into the last span.
int find_span(const std::vector<double>& knots, int degree, double x) {
    const int count = static_cast<int>(knots.size()) - degree - 1;
    if (x >= knots[static_cast<std::size_t>(count)]) return count - 1;
    if (x <= knots[static_cast<std::size_t>(degree)]) return degree;
    int lo = degree, hi = count;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (x < knots[static_cast<std::size_t>(mid)]) hi = mid;
        else lo = mid;
    }
    return lo;
}

// Cox-de Boor triangle: the degree+1 basis functions that are nonzero on the
// span, written into N[0..degree].
void basis_funs(const std::vector<double>& knots, int span, double x, int degree,
                double* N) {
    std::vector<double> left(static_cast<std::size_t>(degree) + 1);
    std::vector<double> right(static_cast<std::size_t>(degree) + 1);
    N[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[static_cast<std::size_t>(j)] = x - knots[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double den = right[static_cast<std::size_t>(r + 1)] +
                               left[static_cast<std::size_t>(j - r)];
            const double temp = den != 0.0 ? N[r] / den : 0.0;
            N[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        N[j] = saved;
    }
}

double quantile(std::vector<double> sorted, double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double w = h - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

Eigen::MatrixXd hermite_raw(const Eigen::VectorXd& z, int L) {
    const Eigen::Index n = z.size();
    Eigen::MatrixXd H(n, L);
    Eigen::VectorXd prev = Eigen::VectorXd::Ones(n);  // degree 0
    Eigen::VectorXd cur = z;                          // degree 1
    if (L >= 1) H.col(0) = cur;
    for (int k = 1; k < L; ++k) {
        // normalized so that E[H_a(Z) H_b(Z)] = delta_ab for Z ~ N(0,1)
        Eigen::VectorXd next =
            (z.cwiseProduct(cur) - std::sqrt(static_cast<double>(k)) * prev) /
            std::sqrt(static_cast<double>(k + 1));
        prev.swap(cur);
        cur.swap(next);
        H.col(k) = cur;
    }
    return H;
}

Eigen::MatrixXd bspline_raw(const Eigen::VectorXd& x, const std::vector<double>& knots,
                            int degree) {
    const int count = static_cast<int>(knots.size()) - degree - 1;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(x.size(), count);
    std::vector<double> N(static_cast<std::size_t>(degree) + 1);
    const double xlo = knots[static_cast<std::size_t>(degree)];
    const double xhi = knots[static_cast<std::size_t>(count)];
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = std::clamp(x[i], xlo, xhi);  // out-of-span points take boundary values
        const int span = find_span(knots, degree, xi);
        basis_funs(knots, span, xi, degree, N.data());
        for (int r = 0; r <= degree; ++r) {
            B(i, span - degree + r) = N[static_cast<std::size_t>(r)];
        }
    }
    return B;
}

Eigen::MatrixXd empirical_orthonormalize(const Eigen::MatrixXd& raw, Eigen::MatrixXd& T,
                                         double tol) {
    const Eigen::Index n = raw.rows();
    const Eigen::Index K = raw.cols();
    Eigen::MatrixXd Q(n, K);
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(K, K + 1);  // over [1, raw...]
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < K; ++j) {
        Eigen::VectorXd q = raw.col(j);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(K + 1);
        c[j + 1] = 1.0;
        // center once to fix the dropout reference scale
        double mean = q.mean();
        q.array() -= mean;
        c[0] -= mean;
        const double ref = std::sqrt(empirical_dot(q, q));
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < kept; ++i) {
                const double r = empirical_dot(q, Q.col(i));
                q -= r * Q.col(i);
                c -= r * coef.row(i).transpose();
            }
            mean = q.mean();
            q.array() -= mean;
            c[0] -= mean;
        }
        const double norm = std::sqrt(empirical_dot(q, q));
        if (!(norm > tol * std::max(ref, 1e-300))) continue;  // dependent direction
        Q.col(kept) = q / norm;
        coef.row(kept) = c.transpose() / norm;
        ++kept;
    }
    T = coef.topRows(kept);
    return Q.leftCols(kept);
}

Eigen::MatrixXd UnivariateSystem::evaluate(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd raw;
    if (family == "hermite") {
        raw = hermite_raw((x.array() - shift) / scale, static_cast<int>(transform.cols()) - 1);
    } else if (family == "bspline") {
        raw = bspline_raw(x, knots, degree);
    } else {
        throw ConfigError("unknown univariate family '" + family + "'");
    }
    Eigen::MatrixXd out = raw * transform.rightCols(transform.cols() - 1).transpose();
    out.rowwise() += transform.col(0).transpose();
    return out;
}

UnivariateSystem hermite_system(const Eigen::VectorXd& x, int L) {
    if (L < 1) throw ConfigError("basis size must be at least 1");
    if (x.size() <= L) {
        throw NumericalError("need more than " + std::to_string(L) +
                             " observations to orthonormalize " + std::to_string(L) +
                             " polynomial functions, got " + std::to_string(x.size()));
    }
    UnivariateSystem sys;
    sys.family = "hermite";
    sys.degree = L;
    sys.shift = x.mean();
    sys.scale = std::sqrt((x.array() - sys.shift).square().sum() /
                          static_cast<double>(x.size()));
    if (!(sys.scale > 0.0)) throw NumericalError("input column is constant");

    const Eigen::MatrixXd raw = hermite_raw((x.array() - sys.shift) / sys.scale, L);
    sys.values = empirical_orthonormalize(raw, sys.transform);
    if (sys.values.cols() != L) {
        throw NumericalError("polynomial family collapsed at degree " +
                             std::to_string(sys.values.cols() + 1) +
                             ": sample has too few distinct values");
    }
    return sys;
}

UnivariateSystem bspline_system(const Eigen::VectorXd& x, int L, int degree) {
    if (L < 1) throw ConfigError("basis size must be at least 1");
    if (degree < 0) throw ConfigError("spline degree must be non-negative");
    degree = std::min(degree, L);  // keep at least one interior interval
    if (x.size() <= L) {
        throw NumericalError("need more than " + std::to_string(L) +
                             " observations to orthonormalize " + std::to_string(L) +
                             " spline functions, got " + std::to_string(x.size()));
    }

    std::vector<double> sorted(x.data(), x.data() + x.size());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (!(hi > lo)) throw NumericalError("input column is constant");

    // Clamped knots: degree+1 copies at each end, interior knots at empirical
    // quantiles; L+1 raw functions form a partition of unity on [lo, hi].
    const int interior = L - degree;
    std::vector<double> knots;
    knots.insert(knots.end(), static_cast<std::size_t>(degree) + 1, lo);
    for (int k = 1; k <= interior; ++k) {
        knots.push_back(quantile(sorted, static_cast<double>(k) /
                                             static_cast<double>(interior + 1)));
    }
    knots.insert(knots.end(), static_cast<std::size_t>(degree) + 1, hi);
    for (std::size_t i = static_cast<std::size_t>(degree);
         i + static_cast<std::size_t>(degree) + 1 < knots.size(); ++i) {
        if (!(knots[i] < knots[i + 1])) {
            throw NumericalError(
                "sample has too few distinct values for the requested spline knots");
        }
    }

    UnivariateSystem sys;
    sys.family = "bspline";
    sys.degree = degree;
    sys.knots = knots;
    const Eigen::MatrixXd raw = bspline_raw(x, knots, degree);
    // The raw family sums to one, so centering leaves exactly L independent
    // directions; losing more than the constant means degenerate data.
    sys.values = empirical_orthonormalize(raw, sys.transform);
    if (sys.values.cols() != L) {
        throw NumericalError("spline family kept " + std::to_string(sys.values.cols()) +
                             " of " + std::to_string(L) +
                             " functions: sample too degenerate for these knots");
    }
    return sys;
}

}  // namespace hofd
