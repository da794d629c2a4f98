#include <doctest.h>

#include <cmath>

#include "liureg/distributions.hpp"
#include "liureg/estimators.hpp"
#include "oracles.hpp"

using namespace liureg;

namespace {

bool exact_equal(const VectorXd& a, const VectorXd& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

PartitionedDesign make_pd(const MatrixXd& X, int p1) {
    Dataset data{VectorXd::Zero(X.rows()), X, {}, {}};
    PartitionSpec spec;
    for (int j = 0; j < p1; ++j) spec.main_idx.push_back(j);
    for (int j = p1; j < X.cols(); ++j) spec.nuisance_idx.push_back(j);
    return partition(data, spec);
}

}  // namespace

TEST_CASE("lse: identity design, mean model, normal-equations oracle") {
    MatrixXd I3 = MatrixXd::Identity(3, 3);
    VectorXd y(3);
    y << 4.0, -1.0, 2.5;
    CHECK((lse(I3, y) - y).cwiseAbs().maxCoeff() < 1e-13);

    MatrixXd ones(3, 1);
    ones.setOnes();
    VectorXd y2(3);
    y2 << 1.0, 2.0, 3.0;
    CHECK(lse(ones, y2)(0) == doctest::Approx(2.0).epsilon(1e-14));

    Xoshiro256pp rng(31);
    const MatrixXd X = oracles::random_matrix(rng, 50, 5);
    const VectorXd y3 = oracles::random_vector(rng, 50);
    const VectorXd expect = oracles::normal_equations_lu(X, y3);
    CHECK((lse(X, y3) - expect).norm() < 1e-10 * expect.norm());

    MatrixXd sing(6, 2);
    sing.col(0) = oracles::random_vector(rng, 6);
    sing.col(1) = sing.col(0);
    CHECK_THROWS(lse(sing, oracles::random_vector(rng, 6)));
}

TEST_CASE("ridge: lambda limits and the diagonal case") {
    Xoshiro256pp rng(32);
    const MatrixXd X = oracles::random_matrix(rng, 30, 4);
    const VectorXd y = oracles::random_vector(rng, 30);
    CHECK((ridge(X, y, 0.0) - lse(X, y)).norm() < 1e-10 * lse(X, y).norm());
    CHECK(ridge(X, y, 1e12).norm() < 1e-6);
    CHECK_THROWS(ridge(X, y, -0.5));

    MatrixXd I2 = MatrixXd::Identity(2, 2);
    VectorXd y2(2);
    y2 << 2.0, 4.0;
    const VectorXd b = ridge(I2, y2, 1.0);
    CHECK(b(0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(b(1) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("liu_full: d=1 equals LSE, diagonal case, composition oracle") {
    Xoshiro256pp rng(33);
    const MatrixXd X = oracles::random_matrix(rng, 40, 4);
    const VectorXd y = oracles::random_vector(rng, 40);
    CHECK((liu_full(X, y, 1.0) - lse(X, y)).cwiseAbs().maxCoeff() < 1e-12);

    MatrixXd I2 = MatrixXd::Identity(2, 2);
    VectorXd y2(2);
    y2 << 2.0, 4.0;
    const VectorXd b = liu_full(I2, y2, 0.5);
    CHECK(b(0) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(b(1) == doctest::Approx(3.0).epsilon(1e-13));

    // two-step oracle with an independent factorization
    const double d = 0.3;
    const MatrixXd gram = X.transpose() * X;
    const VectorXd b_lse = oracles::normal_equations_lu(X, y);
    const MatrixXd I4 = MatrixXd::Identity(4, 4);
    const VectorXd expect =
        Eigen::FullPivLU<MatrixXd>(gram + I4).solve((gram + d * I4) * b_lse);
    CHECK((liu_full(X, y, d) - expect).norm() < 1e-10 * expect.norm());

    CHECK_THROWS(liu_full(X, y, 0.0));
    CHECK_THROWS(liu_full(X, y, 1.5));
}

TEST_CASE("liu_sub_beta1: boundary case and composition oracle") {
    Xoshiro256pp rng(34);
    const MatrixXd X = oracles::random_matrix(rng, 60, 5);
    const VectorXd y = oracles::random_vector(rng, 60);
    const auto pd = make_pd(X, 3);

    CHECK((liu_sub_beta1(pd, y, 1.0) - lse(pd.X1, y)).cwiseAbs().maxCoeff() < 1e-12);

    const double d1 = 0.7;
    const MatrixXd g1 = pd.X1.transpose() * pd.X1;
    const MatrixXd I1 = MatrixXd::Identity(3, 3);
    const VectorXd expect = Eigen::FullPivLU<MatrixXd>(g1 + I1).solve(
        (g1 + d1 * I1) * oracles::normal_equations_lu(pd.X1, y));
    CHECK((liu_sub_beta1(pd, y, d1) - expect).norm() < 1e-10 * expect.norm());
}

TEST_CASE("liu_full_beta1: vacuous nuisance block reduces to the sub-model form") {
    Xoshiro256pp rng(35);
    const MatrixXd X = oracles::random_matrix(rng, 25, 3);
    const VectorXd y = oracles::random_vector(rng, 25);
    const auto pd = make_pd(X, 3);  // p2 = 0
    const double d = 0.6;
    CHECK((liu_full_beta1(pd, y, d) - liu_sub_beta1(pd, y, d)).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("liu_full_beta1: continuous at d -> 1") {
    Xoshiro256pp rng(36);
    const MatrixXd X = oracles::random_matrix(rng, 30, 6);
    const VectorXd y = oracles::random_vector(rng, 30);
    const auto pd = make_pd(X, 3);
    for (LiuFullVariant v : {LiuFullVariant::AsPrinted, LiuFullVariant::Unrestricted}) {
        const VectorXd at_one = liu_full_beta1(pd, y, 1.0, v);
        const VectorXd near_one = liu_full_beta1(pd, y, 1.0 - 1e-8, v);
        CHECK((at_one - near_one).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("liu_full_beta1: orthogonal blocks collapse to the sub-model estimator") {
    Xoshiro256pp rng(37);
    const MatrixXd Q = oracles::orthonormal_design(rng, 40, 6);
    const MatrixXd X = 2.0 * Q;  // orthogonal columns, X1'X2 = 0
    const VectorXd y = oracles::random_vector(rng, 40);
    const auto pd = make_pd(X, 3);
    const double d = 0.45;
    CHECK((liu_full_beta1(pd, y, d) - liu_sub_beta1(pd, y, d)).cwiseAbs().maxCoeff() <
          1e-8);
    // the unrestricted variant agrees too: the partial LSE equals the
    // plain sub-design LSE under block orthogonality
    CHECK((liu_full_beta1(pd, y, d, LiuFullVariant::Unrestricted) -
           liu_sub_beta1(pd, y, d))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
}

TEST_CASE("liu_full_beta1: unrestricted variant at d=1 is the joint-LSE block") {
    Xoshiro256pp rng(38);
    const MatrixXd X = oracles::random_matrix(rng, 30, 5);
    const VectorXd y = oracles::random_vector(rng, 30);
    const auto pd = make_pd(X, 2);
    const VectorXd b1 = liu_full_beta1(pd, y, 1.0, LiuFullVariant::Unrestricted);
    const VectorXd joint = oracles::normal_equations_lu(X, y);
    CHECK((b1 - joint.head(2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ridge_full_beta1: lambda=0 recovers the joint-LSE block") {
    Xoshiro256pp rng(39);
    const MatrixXd X = oracles::random_matrix(rng, 35, 6);
    const VectorXd y = oracles::random_vector(rng, 35);
    const auto pd = make_pd(X, 3);
    const VectorXd joint = oracles::normal_equations_lu(X, y);
    CHECK((ridge_full_beta1(pd, y, 0.0) - joint.head(3)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ridge_full_beta1: vacuous and orthogonal nuisance blocks") {
    Xoshiro256pp rng(40);
    const MatrixXd X0 = oracles::random_matrix(rng, 25, 3);
    const VectorXd y0 = oracles::random_vector(rng, 25);
    const auto pd0 = make_pd(X0, 3);
    CHECK((ridge_full_beta1(pd0, y0, 0.8) - ridge(X0, y0, 0.8)).cwiseAbs().maxCoeff() <
          1e-11);

    const MatrixXd Q = oracles::orthonormal_design(rng, 40, 6);
    const VectorXd y = oracles::random_vector(rng, 40);
    const auto pd = make_pd(Q, 3);
    CHECK((ridge_full_beta1(pd, y, 0.8) - ridge(pd.X1, y, 0.8)).cwiseAbs().maxCoeff() <
          1e-8);
}

TEST_CASE("ridge_sub_beta1: diagonal shrink and oracle") {
    MatrixXd I2 = MatrixXd::Identity(2, 2);
    VectorXd y2(2);
    y2 << 2.0, 4.0;
    const VectorXd b = ridge_sub_beta1(I2, y2, 1.0);
    CHECK(b(0) == doctest::Approx(1.0));
    CHECK(b(1) == doctest::Approx(2.0));

    Xoshiro256pp rng(41);
    const MatrixXd X1 = oracles::random_matrix(rng, 30, 3);
    const VectorXd y = oracles::random_vector(rng, 30);
    CHECK((ridge_sub_beta1(X1, y, 0.0) - lse(X1, y)).norm() < 1e-10);
    const MatrixXd g = X1.transpose() * X1 + 2.5 * MatrixXd::Identity(3, 3);
    const VectorXd expect = Eigen::FullPivLU<MatrixXd>(g).solve(X1.transpose() * y);
    CHECK((ridge_sub_beta1(X1, y, 2.5) - expect).norm() < 1e-10 * expect.norm());
}

TEST_CASE("sigma2_hat: perfect fit, hand computation, consistency") {
    Xoshiro256pp rng(42);
    const MatrixXd X = oracles::random_matrix(rng, 10, 2);
    VectorXd beta(2);
    beta << 1.0, -1.0;
    CHECK(sigma2_hat(X, X * beta, beta) == doctest::Approx(0.0));

    MatrixXd ones(3, 1);
    ones.setOnes();
    VectorXd y(3);
    y << 1.0, 2.0, 3.0;
    VectorXd b(1);
    b << 2.0;
    CHECK(sigma2_hat(ones, y, b) == doctest::Approx(1.0).epsilon(1e-14));

    // consistency at n = 5000, sigma2 = 1
    const int n = 5000;
    const MatrixXd Xl = oracles::random_matrix(rng, n, 3);
    VectorXd bl(3);
    bl << 1.0, 0.5, -0.5;
    VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps(i) = rng.normal();
    const VectorXd yl = Xl * bl + eps;
    const double s2 = sigma2_hat(Xl, yl, liu_full(Xl, yl, 0.9));
    CHECK(s2 > 0.9);
    CHECK(s2 < 1.1);

    CHECK_THROWS(sigma2_hat(MatrixXd::Identity(2, 2), VectorXd::Zero(2),
                            VectorXd::Zero(2)));
}

TEST_CASE("test_statistic: zero under a null projection, scale invariant") {
    Xoshiro256pp rng(43);
    const MatrixXd X = oracles::random_matrix(rng, 20, 5);
    const auto pd = make_pd(X, 2);

    // y in the span of X1 makes the projected beta2 fit exactly zero
    const VectorXd y_span = pd.X1 * oracles::random_vector(rng, 2);
    CHECK(test_statistic(pd, y_span, 1.0) < 1e-16);

    const VectorXd y = oracles::random_vector(rng, 20);
    const double s2 = sigma2_hat(X, y, liu_full(X, y, 0.8));
    const double L1 = test_statistic(pd, y, s2);
    const double c = 3.7;
    const VectorXd yc = c * y;
    const double s2c = sigma2_hat(X, yc, liu_full(X, yc, 0.8));
    const double L2 = test_statistic(pd, yc, s2c);
    CHECK(L1 == doctest::Approx(L2).epsilon(1e-8));
}

TEST_CASE("pretest: accept, reject, and the boundary case included in H0") {
    VectorXd lfm(2), lsm(2);
    lfm << 1.0, 2.0;
    lsm << 3.0, 4.0;
    CHECK(exact_equal(pretest(lfm, lsm, 0.0, 5, 0.05), lsm));
    CHECK(exact_equal(pretest(lfm, lsm, 1e6, 5, 0.05), lfm));
    const double c = chisq_quantile(5, 0.05);
    CHECK(exact_equal(pretest(lfm, lsm, c, 5, 0.05), lsm));  // <= keeps the boundary
    CHECK_THROWS(pretest(lfm, lsm, 1.0, 5, 0.0));
    CHECK_THROWS(pretest(lfm, lsm, 1.0, 5, 1.0));
}

TEST_CASE("stein: exact shrink factors and error paths") {
    VectorXd lfm(2), lsm(2);
    lfm << 2.0, 0.0;
    lsm << 0.0, 2.0;
    const int p2 = 5;
    CHECK((stein(lfm, lsm, p2 - 2.0, p2) - lsm).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((stein(lfm, lsm, 1e12, p2) - lfm).cwiseAbs().maxCoeff() < 1e-9);
    const VectorXd mid = stein(lfm, lsm, 2.0 * (p2 - 2), p2);
    CHECK((mid - 0.5 * (lfm + lsm)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(stein(lfm, lsm, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_WITH_AS(stein(lfm, lsm, 0.0, p2), doctest::Contains("pretest"),
                         std::invalid_argument);
}

TEST_CASE("positive_part: clipping, agreement with stein, continuity in L_n") {
    VectorXd lfm(3), lsm(3);
    lfm << 1.0, -1.0, 0.5;
    lsm << 0.0, 1.0, 0.25;
    const int p2 = 6;
    const double r = p2 - 2.0;
    CHECK(exact_equal(positive_part(lfm, lsm, 0.5 * r, p2), lsm));  // bitwise
    CHECK((positive_part(lfm, lsm, 2.0 * r, p2) - stein(lfm, lsm, 2.0 * r, p2))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    // continuity scan across the clip point
    double prev = -1e9;
    bool first = true;
    VectorXd last;
    for (double L = 0.05 * r; L <= 10.0 * r; L += 0.01 * r) {
        const VectorXd v = positive_part(lfm, lsm, L, p2);
        if (!first) CHECK((v - last).cwiseAbs().maxCoeff() < 0.02);
        last = v;
        first = false;
        // stein factor strictly increasing in L_n
        const double factor = 1.0 - r / L;
        CHECK(factor > prev);
        prev = factor;
    }
}

TEST_CASE("positive_part stays on the segment; stein can leave it") {
    Xoshiro256pp rng(44);
    for (int t = 0; t < 20; ++t) {
        VectorXd lfm = oracles::random_vector(rng, 4);
        VectorXd lsm = oracles::random_vector(rng, 4);
        const double L = 0.2 + 10.0 * rng.uniform();
        const int p2 = 5;
        const VectorXd lps = positive_part(lfm, lsm, L, p2);
        const double f = std::max(0.0, 1.0 - (p2 - 2.0) / L);
        CHECK(f <= 1.0);
        CHECK((lps - (lsm + f * (lfm - lsm))).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("estimate_d: noiseless, noise-dominated, orthonormal closed form") {
    Xoshiro256pp rng(45);
    const MatrixXd X = oracles::random_matrix(rng, 40, 3);
    VectorXd beta(3);
    beta << 1.0, 2.0, -1.0;
    CHECK(estimate_d(X, X * beta) == doctest::Approx(1.0));

    // huge noise, tiny coefficients: clamps at the floor
    VectorXd noise(40);
    for (int i = 0; i < 40; ++i) noise(i) = 50.0 * rng.normal();
    CHECK(estimate_d(X, X * (0.001 * beta) + noise) == doctest::Approx(0.01));

    // orthonormal design: d = 1 - sigma2 (p/2) / sum(alpha^2/4)
    const MatrixXd Q = oracles::orthonormal_design(rng, 60, 4);
    VectorXd b4(4);
    b4 << 2.0, -1.0, 1.5, 0.5;
    VectorXd eps(60);
    for (int i = 0; i < 60; ++i) eps(i) = 0.3 * rng.normal();
    const VectorXd y = Q * b4 + eps;
    const VectorXd bhat = oracles::normal_equations_lu(Q, y);
    const double s2 = (y - Q * bhat).squaredNorm() / (60.0 - 4.0);
    const double expect =
        std::min(1.0, std::max(0.01, 1.0 - 2.0 * s2 * (4.0 / 2.0) / (bhat.squaredNorm() / 2.0)));
    CHECK(estimate_d(Q, y) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("fit_liu_family: coherent pieces and p2 >= 3 gating") {
    Xoshiro256pp rng(46);
    const MatrixXd X = oracles::random_matrix(rng, 50, 7);
    VectorXd beta = VectorXd::Zero(7);
    beta.head(3).setOnes();
    VectorXd eps(50);
    for (int i = 0; i < 50; ++i) eps(i) = rng.normal();
    const VectorXd y = X * beta + eps;

    PartitionSpec spec;
    spec.main_idx = {0, 1, 2};
    spec.nuisance_idx = {3, 4, 5, 6};

    ShrinkageConfig cfg;
    cfg.d_mode = DMode::Fixed;
    cfg.d = 0.7;
    cfg.d1 = 0.7;
    const auto fit = fit_liu_family(X, y, spec, cfg);
    CHECK(fit.L_n > 0.0);
    CHECK(fit.sigma2 > 0.0);
    CHECK(fit.ls.has_value());
    const bool lpt_is_lfm = exact_equal(fit.lpt, fit.lfm);
    const bool lpt_is_lsm = exact_equal(fit.lpt, fit.lsm);
    CHECK((lpt_is_lfm || lpt_is_lsm));

    // scaled_fit reports sigma2 on the raw scale
    ShrinkageConfig scaled = cfg;
    scaled.scaled_fit = true;
    const auto fit2 = fit_liu_family(X, y, spec, scaled);
    CHECK(fit2.sigma2 == doctest::Approx(fit.sigma2).epsilon(0.5));
    CHECK(fit2.L_n > 0.0);
}
