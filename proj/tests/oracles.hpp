#pragma once

// Test-only oracles: independent computation routes the unit and
// acceptance suites compare the library against. Nothing here may call
// the implementation path it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "liureg/rng.hpp"

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Marsaglia-Tsang gamma(shape, scale=1) sampler, shape >= 1.
inline double gamma_draw(liureg::Xoshiro256pp& rng, double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// One draw of a noncentral chi-square with v >= 2 via
// (Z + sqrt(delta))^2 + chi2_{v-1}.
inline double ncchisq_draw(liureg::Xoshiro256pp& rng, int v, double delta) {
    const double z = rng.normal() + std::sqrt(delta);
    double rest = 0.0;
    if (v == 2) {
        const double z2 = rng.normal();
        rest = z2 * z2;
    } else if (v > 2) {
        rest = 2.0 * gamma_draw(rng, 0.5 * (v - 1));
    }
    return z * z + rest;
}

struct McMoment {
    double mean;
    double se;
};

// Monte Carlo estimate of E[f(T)] for T ~ chi2_v(delta).
inline McMoment mc_ncchisq_expectation(int v, double delta, long draws,
                                       const std::function<double(double)>& f,
                                       std::uint64_t seed) {
    liureg::Xoshiro256pp rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < draws; ++i) {
        const double val = f(ncchisq_draw(rng, v, delta));
        sum += val;
        sumsq += val * val;
    }
    const double mean = sum / draws;
    const double var = (sumsq / draws - mean * mean) / (draws - 1);
    return {mean, std::sqrt(std::max(0.0, var))};
}

// Kolmogorov-Smirnov distance of a sample against a CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = cdf(sample[i]);
        d = std::max(d, std::fabs(F - (i + 1) / n));
        d = std::max(d, std::fabs(F - i / n));
    }
    return d;
}

inline MatrixXd random_matrix(liureg::Xoshiro256pp& rng, int n, int p) {
    MatrixXd X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    return X;
}

inline VectorXd random_vector(liureg::Xoshiro256pp& rng, int n) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

// Random n x n orthogonal matrix from the QR of a Gaussian matrix.
inline MatrixXd random_orthogonal(liureg::Xoshiro256pp& rng, int n) {
    const MatrixXd X = random_matrix(rng, n, n);
    return Eigen::HouseholderQR<MatrixXd>(X).householderQ();
}

// With orthonormal columns appended: X whose columns are orthonormal.
inline MatrixXd orthonormal_design(liureg::Xoshiro256pp& rng, int n, int p) {
    const MatrixXd Q = random_orthogonal(rng, n);
    return Q.leftCols(p);
}

// Normal-equations solve by an independent factorization (full-pivot
// LU rather than the library's LDLT route).
inline VectorXd normal_equations_lu(const MatrixXd& X, const VectorXd& y) {
    const MatrixXd A = X.transpose() * X;
    return Eigen::FullPivLU<MatrixXd>(A).solve(X.transpose() * y);
}

// Random symmetric positive definite matrix with unit-ish scale.
inline MatrixXd random_spd(liureg::Xoshiro256pp& rng, int p) {
    const MatrixXd A = random_matrix(rng, p, p);
    return A * A.transpose() / p + MatrixXd::Identity(p, p) * 0.5;
}

}  // namespace oracles
