#pragma once

#include <cstdint>
#include <vector>

#include "liureg/model_core.hpp"

namespace liureg {

struct PenaltyConfig {
    double lambda = 0.0;  // penalty weight >= 0
    double gamma = 1.0;   // adaptive-lasso exponent > 0
    double a = 3.7;       // SCAD shape > 2
    int max_iter = 10000;
    double tol = 1e-7;    // max coefficient change per sweep

    void validate() const;
};

enum class PenalizedMethod { Lasso, AdaptiveLasso, Scad };

// Minimizer of sum (y - x'b)^2 + lambda * sum |b_j| by cyclic
// coordinate descent. Throws on non-convergence, carrying the final
// KKT residual in the message.
VectorXd lasso(const MatrixXd& X, const VectorXd& y, double lambda,
               const PenaltyConfig& cfg);

// Weighted L1 with weights 1/|pilot_j|^gamma (capped at 1e8 when a
// pilot coefficient is exactly zero).
VectorXd adaptive_lasso(const MatrixXd& X, const VectorXd& y, double lambda,
                        const VectorXd& pilot, const PenaltyConfig& cfg);

// SCAD three-branch thresholding rule inside coordinate descent.
VectorXd scad(const MatrixXd& X, const VectorXd& y, double lambda,
              const PenaltyConfig& cfg);

// Max KKT violation of the lasso conditions at beta (used by tests and
// non-convergence diagnostics).
double lasso_kkt_residual(const MatrixXd& X, const VectorXd& y, double lambda,
                          const VectorXd& beta, const VectorXd* weights = nullptr);

struct CvResult {
    double lambda;
    VectorXd beta;  // refit on the full data at the chosen lambda
};

// k-fold cross-validation over a penalty grid; the smallest mean
// squared prediction error wins, first occurrence breaking ties.
// Deterministic given the seed.
CvResult cv_tune(PenalizedMethod method, const MatrixXd& X, const VectorXd& y,
                 const std::vector<double>& grid, int folds, std::uint64_t seed,
                 const PenaltyConfig& cfg = {});

// Log-spaced grid helper for penalty search.
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace liureg
