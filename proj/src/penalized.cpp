#include "liureg/penalized.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "liureg/estimators.hpp"
#include "liureg/rng.hpp"

namespace liureg {

namespace {

double soft_threshold(double z, double thr) {
    if (z > thr) return z - thr;
    if (z < -thr) return z + thr;
    return 0.0;
}

enum class Rule { WeightedL1, Scad };

// SCAD penalty value (half-loss convention, doubled to match the
// sum-of-squares loss used here).
double scad_penalty(double b, double lambda, double a) {
    const double x = std::fabs(b);
    double p;
    if (x <= lambda) {
        p = lambda * x;
    } else if (x <= a * lambda) {
        p = (2.0 * a * lambda * x - x * x - lambda * lambda) / (2.0 * (a - 1.0));
    } else {
        p = lambda * lambda * (a + 1.0) / 2.0;
    }
    return 2.0 * p;
}

double objective_value(const VectorXd& r, const VectorXd& beta, double lambda,
                       const VectorXd* weights, Rule rule, double a) {
    double pen = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (rule == Rule::WeightedL1) {
            pen += lambda * (weights ? (*weights)(j) : 1.0) * std::fabs(beta(j));
        } else {
            pen += scad_penalty(beta(j), lambda, a);
        }
    }
    return r.squaredNorm() + pen;
}

// Cyclic coordinate descent on sum (y - Xb)^2 + penalty. Residuals are
// updated incrementally; convergence is max coefficient change per
// sweep below cfg.tol. Each coordinate update solves its univariate
// problem exactly, so the objective can never increase across sweeps;
// that invariant is asserted.
VectorXd coordinate_descent(const MatrixXd& X, const VectorXd& y, double lambda,
                            const VectorXd* weights, Rule rule,
                            const PenaltyConfig& cfg, const char* label) {
    const Eigen::Index p = X.cols();
    VectorXd colsq(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        colsq(j) = X.col(j).squaredNorm();
        if (colsq(j) <= 0.0) {
            throw std::invalid_argument(std::string(label) + ": zero column " +
                                        std::to_string(j));
        }
    }

    VectorXd beta = VectorXd::Zero(p);
    VectorXd r = y;
    double prev_obj = objective_value(r, beta, lambda, weights, rule, cfg.a);
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double s = colsq(j);
            const double z = X.col(j).dot(r) + s * beta(j);
            double bnew;
            if (rule == Rule::WeightedL1) {
                const double w = weights ? (*weights)(j) : 1.0;
                bnew = soft_threshold(z, 0.5 * lambda * w) / s;
            } else {
                // SCAD thresholding on the per-coordinate OLS value
                // z/s: soft region, linearly interpolated region,
                // identity beyond a*lambda.
                const double zt = z / s;
                const double az = std::fabs(zt);
                const double a = cfg.a;
                if (s * (a - 1.0) <= 1.0) {
                    throw std::runtime_error(std::string(label) +
                                             ": column scale too small for SCAD rule");
                }
                if (az <= lambda * (1.0 + 1.0 / s)) {
                    bnew = soft_threshold(zt, lambda / s);
                } else if (az <= a * lambda) {
                    const double sign = zt > 0.0 ? 1.0 : -1.0;
                    bnew = (s * (a - 1.0) * zt - sign * a * lambda) / (s * (a - 1.0) - 1.0);
                } else {
                    bnew = zt;
                }
            }
            const double change = bnew - beta(j);
            if (change != 0.0) {
                r -= X.col(j) * change;
                beta(j) = bnew;
                max_change = std::max(max_change, std::fabs(change));
            }
        }
        const double obj = objective_value(r, beta, lambda, weights, rule, cfg.a);
        if (obj > prev_obj * (1.0 + 1e-12) + 1e-12) {
            throw std::logic_error(std::string(label) + ": objective increased across a sweep");
        }
        prev_obj = obj;
        if (max_change < cfg.tol) return beta;
    }

    double diag = 0.0;
    if (rule == Rule::WeightedL1) {
        diag = lasso_kkt_residual(X, y, lambda, beta, weights);
    }
    throw std::runtime_error(std::string(label) + ": no convergence after " +
                             std::to_string(cfg.max_iter) +
                             " sweeps, KKT residual " + std::to_string(diag));
}

}  // namespace

void PenaltyConfig::validate() const {
    if (lambda < 0.0) throw std::invalid_argument("PenaltyConfig: lambda must be >= 0");
    if (gamma <= 0.0) throw std::invalid_argument("PenaltyConfig: gamma must be > 0");
    if (a <= 2.0) throw std::invalid_argument("PenaltyConfig: SCAD shape a must be > 2");
    if (max_iter <= 0) throw std::invalid_argument("PenaltyConfig: max_iter must be > 0");
    if (tol <= 0.0) throw std::invalid_argument("PenaltyConfig: tol must be > 0");
}

VectorXd lasso(const MatrixXd& X, const VectorXd& y, double lambda,
               const PenaltyConfig& cfg) {
    cfg.validate();
    if (lambda < 0.0) throw std::invalid_argument("lasso: lambda must be >= 0");
    return coordinate_descent(X, y, lambda, nullptr, Rule::WeightedL1, cfg, "lasso");
}

VectorXd adaptive_lasso(const MatrixXd& X, const VectorXd& y, double lambda,
                        const VectorXd& pilot, const PenaltyConfig& cfg) {
    cfg.validate();
    if (lambda < 0.0) throw std::invalid_argument("adaptive_lasso: lambda must be >= 0");
    if (pilot.size() != X.cols()) {
        throw std::invalid_argument("adaptive_lasso: pilot length mismatch");
    }
    VectorXd w(pilot.size());
    for (Eigen::Index j = 0; j < pilot.size(); ++j) {
        const double m = std::fabs(pilot(j));
        w(j) = m == 0.0 ? 1e8 : std::min(1e8, std::pow(m, -cfg.gamma));
    }
    return coordinate_descent(X, y, lambda, &w, Rule::WeightedL1, cfg, "adaptive_lasso");
}

VectorXd scad(const MatrixXd& X, const VectorXd& y, double lambda,
              const PenaltyConfig& cfg) {
    cfg.validate();
    if (lambda < 0.0) throw std::invalid_argument("scad: lambda must be >= 0");
    return coordinate_descent(X, y, lambda, nullptr, Rule::Scad, cfg, "scad");
}

double lasso_kkt_residual(const MatrixXd& X, const VectorXd& y, double lambda,
                          const VectorXd& beta, const VectorXd* weights) {
    const VectorXd r = y - X * beta;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double g = 2.0 * X.col(j).dot(r);
        const double w = weights ? (*weights)(j) : 1.0;
        double viol;
        if (beta(j) == 0.0) {
            viol = std::max(0.0, std::fabs(g) - lambda * w);
        } else {
            viol = std::fabs(g - lambda * w * (beta(j) > 0.0 ? 1.0 : -1.0));
        }
        worst = std::max(worst, viol);
    }
    return worst;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw std::invalid_argument("log_grid: need 0 < lo < hi and points >= 2");
    }
    std::vector<double> g(points);
    const double llo = std::log10(lo);
    const double lhi = std::log10(hi);
    for (int i = 0; i < points; ++i) {
        g[i] = std::pow(10.0, llo + (lhi - llo) * i / (points - 1));
    }
    return g;
}

namespace {

VectorXd fit_method(PenalizedMethod method, const MatrixXd& X, const VectorXd& y,
                    double lambda, const PenaltyConfig& cfg) {
    switch (method) {
        case PenalizedMethod::Lasso:
            return lasso(X, y, lambda, cfg);
        case PenalizedMethod::AdaptiveLasso: {
            // root-n consistent pilot: LSE on well-conditioned designs,
            // ridge under multicollinearity
            VectorXd pilot;
            double cn = 0.0;
            bool singular = false;
            try {
                cn = condition_number(X);
            } catch (const std::exception&) {
                singular = true;
            }
            if (!singular && cn <= kConditionNumberThreshold) {
                pilot = lse(X, y);
            } else {
                pilot = ridge(X, y, ridge_gcv_lambda(X, y));
            }
            return adaptive_lasso(X, y, lambda, pilot, cfg);
        }
        case PenalizedMethod::Scad:
            return scad(X, y, lambda, cfg);
    }
    throw std::logic_error("fit_method: unreachable");
}

}  // namespace

CvResult cv_tune(PenalizedMethod method, const MatrixXd& X, const VectorXd& y,
                 const std::vector<double>& grid, int folds, std::uint64_t seed,
                 const PenaltyConfig& cfg) {
    const Eigen::Index n = X.rows();
    if (grid.empty()) throw std::invalid_argument("cv_tune: empty grid");
    for (double g : grid) {
        if (!(g > 0.0)) throw std::invalid_argument("cv_tune: grid values must be > 0");
    }
    if (folds < 2) throw std::invalid_argument("cv_tune: folds must be >= 2");
    if (folds > n) {
        throw std::invalid_argument("cv_tune: more folds than rows leaves an empty fold");
    }

    // deterministic fold assignment from the seed
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Xoshiro256pp rng(derive_stream({seed, 0x6376}));
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto k = rng.uniform_index(static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[k]);
    }
    std::vector<int> fold_of(n);
    for (Eigen::Index i = 0; i < n; ++i) fold_of[perm[i]] = static_cast<int>(i % folds);

    double best_mse = std::numeric_limits<double>::infinity();
    double best_lambda = grid.front();
    for (double lambda : grid) {
        double sse = 0.0;
        for (int f = 0; f < folds; ++f) {
            std::vector<int> train, test;
            for (Eigen::Index i = 0; i < n; ++i) {
                (fold_of[i] == f ? test : train).push_back(static_cast<int>(i));
            }
            MatrixXd Xtr(train.size(), X.cols());
            VectorXd ytr(train.size());
            for (std::size_t i = 0; i < train.size(); ++i) {
                Xtr.row(i) = X.row(train[i]);
                ytr(i) = y(train[i]);
            }
            const VectorXd beta = fit_method(method, Xtr, ytr, lambda, cfg);
            for (int i : test) {
                const double e = y(i) - X.row(i).dot(beta);
                sse += e * e;
            }
        }
        const double mse = sse / static_cast<double>(n);
        if (mse < best_mse) {
            best_mse = mse;
            best_lambda = lambda;
        }
    }
    return {best_lambda, fit_method(method, X, y, best_lambda, cfg)};
}

}  // namespace liureg
