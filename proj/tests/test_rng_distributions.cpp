#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <vector>

#include "hofd/distributions.hpp"
#include "hofd/errors.hpp"
#include "hofd/models.hpp"
#include "hofd/rng.hpp"
#include "oracles.hpp"

using namespace hofd;

namespace {

Eigen::MatrixXd empirical_cov(const Eigen::MatrixXd& X) {
    const Eigen::MatrixXd C = X.rowwise() - X.colwise().mean();
    return C.transpose() * C / static_cast<double>(X.rows() - 1);
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ca = a.array() - a.mean();
    const Eigen::VectorXd cb = b.array() - b.mean();
    return ca.dot(cb) / (ca.norm() * cb.norm());
}

Eigen::VectorXd ranks(const Eigen::VectorXd& v) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
    Eigen::VectorXd r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        r[order[i]] = static_cast<double>(i + 1);
    }
    return r;
}

double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return pearson(ranks(a), ranks(b));
}

// Kolmogorov-Smirnov distance of a sample to U[lo, hi].
double ks_uniform(const Eigen::VectorXd& v, double lo, double hi) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double cdf = (s[i] - lo) / (hi - lo);
        d = std::max(d, std::abs((i + 1) / n - cdf));
        d = std::max(d, std::abs(cdf - i / n));
    }
    return d;
}

const char* kTmpCsv = "hofd_test_sample.csv";

struct TmpFile {
    explicit TmpFile(const std::string& content) {
        std::ofstream out(kTmpCsv);
        out << content;
    }
    ~TmpFile() { std::remove(kTmpCsv); }
};

}  // namespace

TEST_CASE("counter rng is deterministic and uniform variates live in (0,1)") {
    const PhiloxRng a(42), b(42), c(43);
    for (std::uint64_t i = 0; i < 64; ++i) {
        CHECK(a.uniform(0, i) == b.uniform(0, i));
        CHECK(a.normal(1, i) == b.normal(1, i));
        const double u = a.uniform(0, i);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    int differs = 0;
    for (std::uint64_t i = 0; i < 64; ++i) {
        differs += a.uniform(0, i) != c.uniform(0, i);
        differs += a.uniform(5, i) != a.uniform(6, i);
    }
    CHECK(differs > 120);  // different seeds and streams decouple
}

TEST_CASE("normal variates invert the normal cdf of the matching uniforms") {
    const PhiloxRng rng(7);
    for (std::uint64_t i = 0; i < 200; ++i) {
        const double u = rng.uniform(3, i);
        const double z = rng.normal(3, i);
        CHECK(detail::normal_cdf(z) == doctest::Approx(u).epsilon(1e-12));
    }
    CHECK(detail::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(detail::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    for (double z = -8.0; z <= 8.0; z += 0.37) {
        const double back = detail::inverse_normal_cdf(detail::normal_cdf(z));
        if (z <= 5.0) {
            CHECK(back == doctest::Approx(z).epsilon(1e-11));
        } else {
            // Far in the upper tail the cdf saturates toward 1, so the
            // representable spacing near 1 caps the roundtrip accuracy at
            // roughly eps / density(z); allow that floor plus slack.
            const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
            const double floor = 3.0 * (1.2e-16 / density) + 1e-11;
            CHECK(std::abs(back - z) < floor);
        }
    }
}

TEST_CASE("gaussian sampler: shape, determinism, and identity covariance") {
    const Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
    const Sample s = sample_gaussian(mean, cov, 4, 9);
    CHECK(s.n() == 4);
    CHECK(s.p() == 3);
    const Sample t = sample_gaussian(mean, cov, 4, 9);
    CHECK((s.X - t.X).cwiseAbs().maxCoeff() == 0.0);

    const Sample big = sample_gaussian(mean, cov, 100000, 9);
    CHECK(big.X.colwise().mean().cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("gaussian sampler reproduces the correlated three-input covariance") {
    const InputModel model = toy_input_model();
    const Sample s = model.sample(100000, 11);
    const Eigen::MatrixXd cov = empirical_cov(s.X);
    CHECK(pearson(s.X.col(0), s.X.col(1)) == doctest::Approx(0.6).epsilon(0.017));

    Eigen::MatrixXd target(3, 3);
    const double s1 = 0.2, s2 = 0.2, s3 = 0.18, g = 0.6;
    target << s1 * s1, g * s1 * s2, 0, g * s1 * s2, s2 * s2, 0, 0, 0, s3 * s3;
    CHECK((cov - target).norm() < 5e-2);
}

TEST_CASE("gaussian sampler rejects a covariance with a negative eigenvalue") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(sample_gaussian(Eigen::VectorXd::Zero(2), bad, 10, 1), ConfigError);
    try {
        sample_gaussian(Eigen::VectorXd::Zero(2), bad, 10, 1);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("positive definite") != std::string::npos);
    }
}

TEST_CASE("mixture with weight 1 reproduces the plain gaussian bit for bit") {
    const Eigen::VectorXd mean = (Eigen::VectorXd(2) << 1.0, -2.0).finished();
    Eigen::MatrixXd cov(2, 2), cov2(2, 2);
    cov << 2.0, 0.3, 0.3, 1.0;
    cov2 << 5.0, -1.0, -1.0, 4.0;
    const Sample a = sample_gaussian_mixture(1.0, mean, cov, cov2, 500, 21);
    const Sample b = sample_gaussian(mean, cov, 500, 21);
    CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rare-component mixture keeps the shared mean") {
    // Material pair: 2% scattered component around the same center.
    const Eigen::VectorXd mu = (Eigen::VectorXd(2) << 210.0, 500.0).finished();
    const Eigen::MatrixXd sig = (Eigen::VectorXd(2) << 350.0, 29.0).finished().asDiagonal();
    Eigen::MatrixXd omg(2, 2);
    omg << 175.0, 81.0, 81.0, 417.0;
    const Sample s = sample_gaussian_mixture(0.02, mu, sig, omg, 100000, 5);
    CHECK(s.X.col(0).mean() == doctest::Approx(210.0).epsilon(0.01));
    CHECK(s.X.col(1).mean() == doctest::Approx(500.0).epsilon(0.01));
}

TEST_CASE("mixture of identical components matches the plain gaussian on moments") {
    const Eigen::VectorXd mu = (Eigen::VectorXd(2) << 3.0, -1.0).finished();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    const Sample mix = sample_gaussian_mixture(0.5, mu, eye, eye, 100000, 31);
    const Sample ref = sample_gaussian(mu, eye, 100000, 32);
    CHECK((mix.X.colwise().mean() - ref.X.colwise().mean()).cwiseAbs().maxCoeff() < 0.02);
    CHECK((empirical_cov(mix.X) - empirical_cov(ref.X)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("independent copula margins pass a Kolmogorov-Smirnov check") {
    const Eigen::VectorXd lo = (Eigen::VectorXd(2) << 1800.0, 360.0).finished();
    const Eigen::VectorXd hi = (Eigen::VectorXd(2) << 2200.0, 440.0).finished();
    const Sample s = sample_correlated_uniform(lo, hi, Eigen::MatrixXd::Identity(2, 2),
                                               10000, 3);
    // 1% critical value of the one-sample KS statistic.
    const double crit = 1.628 / std::sqrt(10000.0);
    CHECK(ks_uniform(s.X.col(0), 1800.0, 2200.0) < crit);
    CHECK(ks_uniform(s.X.col(1), 360.0, 440.0) < crit);
    CHECK(std::abs(pearson(s.X.col(0), s.X.col(1))) < 0.03);
}

TEST_CASE("copula sampler recovers the geometry rank correlations") {
    const Eigen::VectorXd lo = (Eigen::VectorXd(3) << 1800.0, 360.0, 180.0).finished();
    const Eigen::VectorXd hi = (Eigen::VectorXd(3) << 2200.0, 440.0, 220.0).finished();
    Eigen::MatrixXd rho(3, 3);
    rho << 1.0, 0.85, 0.3, 0.85, 1.0, 0.3, 0.3, 0.3, 1.0;
    const Sample s = sample_correlated_uniform(lo, hi, rho, 100000, 17);
    CHECK(spearman(s.X.col(0), s.X.col(1)) == doctest::Approx(0.85).epsilon(0.024));
    CHECK(spearman(s.X.col(0), s.X.col(2)) == doctest::Approx(0.30).epsilon(0.067));
    CHECK(spearman(s.X.col(1), s.X.col(2)) == doctest::Approx(0.30).epsilon(0.067));
    const double crit = 1.628 / std::sqrt(100000.0);
    for (int j = 0; j < 3; ++j) {
        CHECK(ks_uniform(s.X.col(j), lo[j], hi[j]) < crit);
    }
}

TEST_CASE("near-singular rank correlation succeeds with a condition warning") {
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(2);
    Eigen::MatrixXd rho(2, 2);
    rho << 1.0, 0.999, 0.999, 1.0;
    const Sample s = sample_correlated_uniform(lo, hi, rho, 20000, 8);
    CHECK(!s.warnings.empty());
    CHECK(spearman(s.X.col(0), s.X.col(1)) == doctest::Approx(0.999).epsilon(0.005));

    // The latent-correlation map is validated by quadrature: with latent
    // Pearson r = 2 sin(pi rho_s / 6), 12 E[F(Z1) F(Z2)] - 3 recovers rho_s.
    const double target = 0.999;
    const double r = 2.0 * std::sin(M_PI * target / 6.0);
    Eigen::MatrixXd latent(2, 2);
    latent << 1.0, r, r, 1.0;
    const oracle::Grid grid = oracle::gaussian_grid(Eigen::VectorXd::Zero(2), latent, 80);
    Eigen::VectorXd prod(grid.points.rows());
    for (Eigen::Index i = 0; i < grid.points.rows(); ++i) {
        prod[i] = detail::normal_cdf(grid.points(i, 0)) * detail::normal_cdf(grid.points(i, 1));
    }
    CHECK(12.0 * oracle::integrate(grid, prod) - 3.0 == doctest::Approx(target).epsilon(2e-3));
}

TEST_CASE("csv round trip preserves values and the response flag") {
    const InputModel model = toy_input_model();
    Sample s = model.sample(50, 4);
    s.y = toy_response(s.X);
    s.has_response = true;
    save_sample(s, kTmpCsv);
    const Sample back = load_sample(kTmpCsv);
    std::remove(kTmpCsv);
    CHECK(back.has_response);
    CHECK(back.n() == 50);
    CHECK(back.p() == 3);
    CHECK((back.X - s.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.y - s.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv loader handles a plain well-formed file") {
    TmpFile f("x1,x2,y\n1.0,2.0,3.0\n4.0,5.0,6.0\n7.0,8.0,9.0\n");
    const Sample s = load_sample(kTmpCsv);
    CHECK(s.n() == 3);
    CHECK(s.p() == 2);
    CHECK(s.has_response);
    CHECK(s.y[2] == 9.0);
}

TEST_CASE("csv loader rejects a nan cell, naming its position") {
    TmpFile f("x1,x2,y\n1.0,2.0,3.0\n4.0,nan,6.0\n7.0,8.0,9.0\n");
    CHECK_THROWS_AS(load_sample(kTmpCsv), DataError);
    try {
        load_sample(kTmpCsv);
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3") != std::string::npos);   // line number
        CHECK(msg.find("x2") != std::string::npos);   // column name
    }
}

TEST_CASE("csv loader rejects non-numeric cells and ragged rows") {
    {
        TmpFile f("x1,y\n1.0,2.0\nabc,3.0\n");
        CHECK_THROWS_AS(load_sample(kTmpCsv), DataError);
    }
    {
        TmpFile f("x1,x2,y\n1.0,2.0,3.0\n4.0,5.0\n");
        CHECK_THROWS_AS(load_sample(kTmpCsv), DataError);
    }
}

TEST_CASE("constant input column is a hard error") {
    TmpFile f("x1,x2,y\n5.0,2.0,3.0\n5.0,4.0,6.0\n5.0,6.0,9.0\n");
    CHECK_THROWS_AS(load_sample(kTmpCsv), DataError);
    try {
        load_sample(kTmpCsv);
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
}

TEST_CASE("single-row file fails the minimum-rows check") {
    TmpFile f("x1,y\n1.0,2.0\n");
    CHECK_THROWS_AS(load_sample(kTmpCsv), DataError);
}

TEST_CASE("input model blocks are independent and reproducible") {
    const InputModel vessel = vessel_input_model();
    CHECK(vessel.dimension() == 8);
    const Sample a = vessel.sample(2000, 77);
    const Sample b = vessel.sample(2000, 77);
    CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
    a.validate();

    // Geometry bounds hold.
    CHECK(a.X.col(0).minCoeff() >= 1800.0);
    CHECK(a.X.col(0).maxCoeff() <= 2200.0);
    CHECK(a.X.col(1).minCoeff() >= 360.0);
    CHECK(a.X.col(2).maxCoeff() <= 220.0);

    // Cross-block columns decorrelate.
    CHECK(std::abs(pearson(a.X.col(0), a.X.col(3))) < 0.06);
    CHECK(std::abs(pearson(a.X.col(4), a.X.col(7))) < 0.06);
}
