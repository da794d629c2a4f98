#pragma once

#include <functional>

namespace liureg {

struct QuadratureResult {
    double value;
    double error_estimate;
    bool converged;
};

// Adaptive Gauss-Kronrod (G7,K15) on [a, b]. Recursively bisects
// panels whose K15-G7 discrepancy exceeds the local tolerance budget.
// Throws on non-convergence only when `throw_on_failure`; otherwise
// reports the achieved error estimate.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    double abs_tol = 1e-10,
                                    double rel_tol = 1e-8,
                                    int max_depth = 60);

}  // namespace liureg
