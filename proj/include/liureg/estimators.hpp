#pragma once

#include <optional>
#include <string>

#include "liureg/model_core.hpp"

namespace liureg {

enum class Estimator {
    Lse,
    RidgeFull,
    RidgeSub,
    LiuFull,
    LiuSub,
    Pretest,
    Stein,
    PositivePart,
    Lasso,
    AdaptiveLasso,
    Scad,
};

const char* estimator_label(Estimator e);
Estimator estimator_from_label(const std::string& label);

enum class DMode { Estimated, Fixed };

// Two readings of the Liu full-model estimator of beta1: the printed
// formula applies the Liu transform to the plain sub-design LSE
// (AsPrinted); Unrestricted applies it to the partial LSE that
// adjusts for the nuisance block first.
enum class LiuFullVariant { AsPrinted, Unrestricted };

struct ShrinkageConfig {
    double d = 1.0;          // Liu parameter, (0,1]; used when d_mode == Fixed
    double d1 = 1.0;         // sub-model Liu parameter, (0,1]
    double lambda_r = 0.0;   // ridge penalty >= 0
    double lambda_r1 = 0.0;  // sub-model ridge penalty >= 0
    double alpha = 0.05;     // pretest level, (0,1)

    DMode d_mode = DMode::Estimated;
    LiuFullVariant liu_variant = LiuFullVariant::AsPrinted;
    // Fit on (X, y)/sqrt(n) so gram matrices are O(1) (correlation
    // form). Coefficients are unchanged; shrinkage strength is not.
    bool scaled_fit = false;

    void validate() const;
};

struct EstimateResult {
    Estimator kind;
    VectorXd beta1;
    std::optional<VectorXd> beta2;   // present for full-vector kinds
    std::optional<double> L_n;       // present for LPT/LS/LPS
    std::optional<double> sigma2_hat;
};

// --- closed-form estimators (pure functions) ---

VectorXd lse(const MatrixXd& X, const VectorXd& y);

VectorXd ridge(const MatrixXd& X, const VectorXd& y, double lambda);

// (X'X + I)^-1 (X'X + d I) beta_lse, 0 < d <= 1.
VectorXd liu_full(const MatrixXd& X, const VectorXd& y, double d);

VectorXd liu_sub_beta1(const PartitionedDesign& pd, const VectorXd& y, double d1);

VectorXd liu_full_beta1(const PartitionedDesign& pd, const VectorXd& y, double d,
                        LiuFullVariant variant = LiuFullVariant::AsPrinted);

VectorXd ridge_full_beta1(const PartitionedDesign& pd, const VectorXd& y, double lambda);

VectorXd ridge_sub_beta1(const MatrixXd& X1, const VectorXd& y, double lambda1);

// (1/(n-p)) ||y - X beta||^2 with the full-model Liu coefficients.
double sigma2_hat(const MatrixXd& X, const VectorXd& y, const VectorXd& beta_lfm);

// Quadratic-form statistic for H0: beta2 = 0; chi-square with p2
// degrees of freedom under the null for large n.
double test_statistic(const PartitionedDesign& pd, const VectorXd& y, double sigma2);

// Chooses the sub-model estimate when L_n falls at or below the
// upper-alpha chi-square(p2) critical value, the full-model estimate
// otherwise. Output is bitwise one of the two inputs.
VectorXd pretest(const VectorXd& lfm, const VectorXd& lsm, double L_n, int p2,
                 double alpha);

// lsm + (lfm - lsm) (1 - (p2-2)/L_n), p2 >= 3.
VectorXd stein(const VectorXd& lfm, const VectorXd& lsm, double L_n, int p2);

// stein with the shrink factor clipped at zero; returns lsm bitwise
// when L_n <= p2 - 2.
VectorXd positive_part(const VectorXd& lfm, const VectorXd& lsm, double L_n, int p2);

// Data-driven Liu parameter (MSE-minimizing form), clamped to
// [0.01, 1]. Falls back to 1 on a degenerate denominator.
double estimate_d(const MatrixXd& X, const VectorXd& y);

// Ridge penalty by generalized cross-validation over a 50-point log
// grid on [1e-4, 1e2].
double ridge_gcv_lambda(const MatrixXd& X, const VectorXd& y);

// --- one-shot fit of the Liu family on a partitioned design ---

struct LiuFamilyFit {
    VectorXd lfm;             // beta1, full model
    VectorXd lsm;             // beta1, sub-model
    VectorXd lpt;             // pretest
    std::optional<VectorXd> ls;   // Stein (needs p2 >= 3)
    std::optional<VectorXd> lps;  // positive part
    VectorXd joint_liu;       // full p-vector Liu estimate
    double d = 1.0;
    double d1 = 1.0;
    double sigma2 = 0.0;      // on the raw-data scale
    double L_n = 0.0;
};

LiuFamilyFit fit_liu_family(const MatrixXd& X, const VectorXd& y,
                            const PartitionSpec& spec, const ShrinkageConfig& cfg);

}  // namespace liureg
