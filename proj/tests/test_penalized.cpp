#include <doctest.h>

#include <cmath>

#include "liureg/estimators.hpp"
#include "liureg/penalized.hpp"
#include "oracles.hpp"

using namespace liureg;

namespace {

double soft(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace

TEST_CASE("lasso: unpenalized limit, full-shrinkage threshold, orthonormal closed form") {
    Xoshiro256pp rng(51);
    const MatrixXd X = oracles::random_matrix(rng, 40, 5);
    const VectorXd y = oracles::random_vector(rng, 40);
    PenaltyConfig cfg;

    CHECK((lasso(X, y, 0.0, cfg) - lse(X, y)).cwiseAbs().maxCoeff() < 1e-6);

    // threshold computed coordinate-wise, matching the descent's own
    // accumulation, so the boundary case is bitwise exact
    double lmax = 0.0;
    for (int j = 0; j < X.cols(); ++j) {
        lmax = std::max(lmax, 2.0 * std::fabs(X.col(j).dot(y)));
    }
    CHECK(lasso(X, y, lmax, cfg).cwiseAbs().maxCoeff() == 0.0);
    CHECK(lasso(X, y, 2.0 * lmax, cfg).cwiseAbs().maxCoeff() == 0.0);

    const MatrixXd Q = oracles::orthonormal_design(rng, 50, 4);
    const VectorXd y2 = oracles::random_vector(rng, 50);
    const double lambda = 0.4;
    const VectorXd got = lasso(Q, y2, lambda, cfg);
    const VectorXd b_lse = oracles::normal_equations_lu(Q, y2);
    for (int j = 0; j < 4; ++j) {
        CHECK(got(j) == doctest::Approx(soft(b_lse(j), lambda / 2.0)).epsilon(1e-6));
    }
}

TEST_CASE("lasso: KKT conditions hold at the solution") {
    Xoshiro256pp rng(52);
    for (int t = 0; t < 10; ++t) {
        const MatrixXd X = oracles::random_matrix(rng, 30, 6);
        VectorXd beta = VectorXd::Zero(6);
        beta(0) = 2.0;
        beta(3) = -1.0;
        const VectorXd y = X * beta + 0.5 * oracles::random_vector(rng, 30);
        PenaltyConfig cfg;
        const double lambda = 1.0 + 5.0 * rng.uniform();
        const VectorXd b = lasso(X, y, lambda, cfg);
        CHECK(lasso_kkt_residual(X, y, lambda, b) < 50.0 * cfg.tol);
    }
}

TEST_CASE("adaptive_lasso: uniform weights rescale lambda, zero pilot capped") {
    Xoshiro256pp rng(53);
    const MatrixXd X = oracles::random_matrix(rng, 35, 4);
    const VectorXd y = oracles::random_vector(rng, 35);
    PenaltyConfig cfg;

    VectorXd pilot(4);
    pilot << 0.5, -0.5, 0.5, -0.5;  // all |pilot| = 0.5, weights = 2 at gamma = 1
    const VectorXd a = adaptive_lasso(X, y, 1.0, pilot, cfg);
    const VectorXd b = lasso(X, y, 2.0, cfg);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);

    CHECK((adaptive_lasso(X, y, 0.0, pilot, cfg) - lse(X, y)).cwiseAbs().maxCoeff() < 1e-6);

    VectorXd pilot0 = pilot;
    pilot0(2) = 0.0;  // capped weight 1e8 wipes that coordinate out
    const VectorXd c = adaptive_lasso(X, y, 1e-4, pilot0, cfg);
    CHECK(c(2) == 0.0);

    const MatrixXd Q = oracles::orthonormal_design(rng, 40, 4);
    const VectorXd y2 = oracles::random_vector(rng, 40);
    VectorXd pw(4);
    pw << 1.0, 0.5, 2.0, 0.25;
    const double lambda = 0.3;
    const VectorXd got = adaptive_lasso(Q, y2, lambda, pw, cfg);
    const VectorXd b_lse = oracles::normal_equations_lu(Q, y2);
    for (int j = 0; j < 4; ++j) {
        const double w = std::pow(std::fabs(pw(j)), -cfg.gamma);
        CHECK(got(j) == doctest::Approx(soft(b_lse(j), lambda * w / 2.0)).epsilon(1e-5));
    }
}

TEST_CASE("scad: unpenalized limit and the orthonormal threshold regions") {
    Xoshiro256pp rng(54);
    const MatrixXd X = oracles::random_matrix(rng, 40, 5);
    const VectorXd y = oracles::random_vector(rng, 40);
    PenaltyConfig cfg;
    CHECK((scad(X, y, 0.0, cfg) - lse(X, y)).cwiseAbs().maxCoeff() < 1e-6);

    // orthonormal: coordinates decouple; beyond a*lambda the rule is
    // the identity (unbiasedness region), below lambda it zeroes
    const MatrixXd Q = oracles::orthonormal_design(rng, 60, 3);
    VectorXd target(3);
    target << 5.0, 0.3, 1.2;
    const VectorXd y2 = Q * target;  // noiseless for exact region checks
    const double lambda = 0.5;      // a*lambda = 1.85
    const VectorXd got = scad(Q, y2, lambda, cfg);
    const VectorXd b_lse = oracles::normal_equations_lu(Q, y2);
    CHECK(got(0) == doctest::Approx(b_lse(0)).epsilon(1e-8));   // |b| > a lambda
    CHECK(got(1) == 0.0);                                       // |b| <= lambda
    // middle region: ((a-1) z - a lambda sign(z)) / (a - 2)
    const double mid = ((cfg.a - 1.0) * b_lse(2) - cfg.a * lambda) / (cfg.a - 2.0);
    CHECK(got(2) == doctest::Approx(mid).epsilon(1e-6));
}

TEST_CASE("penalized: non-convergence carries the KKT residual") {
    Xoshiro256pp rng(55);
    const MatrixXd X = oracles::random_matrix(rng, 30, 4);
    const VectorXd y = 10.0 * oracles::random_vector(rng, 30);
    PenaltyConfig strict;
    strict.max_iter = 1;
    strict.tol = 1e-14;
    CHECK_THROWS_WITH_AS(lasso(X, y, 0.5, strict), doctest::Contains("KKT"),
                         std::runtime_error);
}

TEST_CASE("cv_tune: single grid value, determinism, noise sparsity") {
    Xoshiro256pp rng(56);
    const MatrixXd X = oracles::random_matrix(rng, 40, 6);
    VectorXd beta = VectorXd::Zero(6);
    beta(1) = 1.5;
    const VectorXd y = X * beta + oracles::random_vector(rng, 40);

    const auto one = cv_tune(PenalizedMethod::Lasso, X, y, {0.7}, 5, 99);
    CHECK(one.lambda == 0.7);

    const auto a = cv_tune(PenalizedMethod::Lasso, X, y, log_grid(0.01, 10.0, 12), 5, 7);
    const auto b = cv_tune(PenalizedMethod::Lasso, X, y, log_grid(0.01, 10.0, 12), 5, 7);
    CHECK(a.lambda == b.lambda);
    CHECK((a.beta - b.beta).cwiseAbs().maxCoeff() == 0.0);

    // duplicate grid values must not disturb the choice
    const auto c = cv_tune(PenalizedMethod::Lasso, X, y, {0.7, 0.7, 0.7}, 5, 99);
    CHECK(c.lambda == 0.7);

    CHECK_THROWS(cv_tune(PenalizedMethod::Lasso, X, y, {}, 5, 1));
    CHECK_THROWS(cv_tune(PenalizedMethod::Lasso, X, y, {0.1}, 1, 1));
    CHECK_THROWS(cv_tune(PenalizedMethod::Lasso, X, y, {0.1}, 41, 1));

    // pure-noise response: the tuned lasso should zero out most
    // coordinates in the bulk of runs
    int sparse_runs = 0;
    for (int s = 0; s < 20; ++s) {
        Xoshiro256pp r2(1000 + s);
        const MatrixXd Xs = oracles::random_matrix(r2, 40, 6);
        const VectorXd ys = oracles::random_vector(r2, 40);
        const double lmax = 2.0 * (Xs.transpose() * ys).cwiseAbs().maxCoeff();
        const auto fit = cv_tune(PenalizedMethod::Lasso, Xs, ys,
                                 log_grid(lmax * 1e-3, lmax, 20), 5, 77 + s);
        int zeros = 0;
        for (int j = 0; j < 6; ++j) zeros += fit.beta(j) == 0.0;
        if (zeros >= 3) ++sparse_runs;
    }
    CHECK(sparse_runs >= 15);
}

TEST_CASE("penalized: halving lambda never raises the penalized objective") {
    Xoshiro256pp rng(57);
    const MatrixXd X = oracles::random_matrix(rng, 30, 5);
    const VectorXd y = oracles::random_vector(rng, 30);
    PenaltyConfig cfg;
    const auto objective = [&](const VectorXd& b, double lambda) {
        return (y - X * b).squaredNorm() + lambda * b.cwiseAbs().sum();
    };
    double lambda = 8.0;
    double prev = objective(lasso(X, y, lambda, cfg), lambda);
    for (int k = 0; k < 6; ++k) {
        lambda /= 2.0;
        const double cur = objective(lasso(X, y, lambda, cfg), lambda);
        CHECK(cur <= prev + 1e-9);
        prev = cur;
    }
}
