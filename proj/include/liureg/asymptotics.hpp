#pragma once

#include "liureg/estimators.hpp"
#include "liureg/model_core.hpp"

namespace liureg {

// Population quantities the limit theory is evaluated at: the gram
// limit C with its blocks, the local-alternative direction kappa (the
// sqrt(n)-scaled nuisance coefficients), the error variance, the Liu
// parameter, the coefficient vector entering the bias terms, and the
// risk weight matrix.
struct AsymptoticInputs {
    MatrixXd C;       // p x p symmetric positive definite
    VectorXd kappa;   // length p2
    double sigma2 = 1.0;
    double d = 1.0;   // (0, 1]
    VectorXd beta;    // length p
    MatrixXd W;       // p1 x p1 symmetric positive definite

    int p() const { return static_cast<int>(C.rows()); }
    int p2() const { return static_cast<int>(kappa.size()); }
    int p1() const { return p() - p2(); }

    void validate() const;
};

// Symbols feeding the bias/covariance/risk formulas. derive_symbols
// fills them from AsymptoticInputs; tests may also construct them
// directly from independently-derived values.
struct DerivedSymbols {
    int p1 = 0;
    int p2 = 0;
    double sigma2 = 1.0;
    double d = 1.0;

    MatrixXd F_d;      // (C+I)^-1 (C+dI), p x p
    MatrixXd F_d11;    // (C11+I)^-1 (C11+dI), p1 x p1
    MatrixXd S;        // F_d C^-1 F_d'
    MatrixXd S11, S12, S21, S22;
    MatrixXd S11_2;    // S11 - S12 S22^-1 S21
    MatrixXd S22_1;    // S22 - S21 S11^-1 S12

    VectorXd mu;       // -(1-d) (C+I)^-1 beta
    VectorXd mu_11_2;  // mu1 - C12 C22^-1 ((beta2 - kappa) - mu2)
    VectorXd delta;    // F_d11 C12 kappa
    VectorXd gamma;    // -(mu_11_2 + delta)
    MatrixXd Phi;      // sigma2 F_d11 C12 S22_1^-1 C21 F_d11
    double Delta = 0.0;  // kappa' C22_1^-1 kappa / sigma2

    MatrixXd var_full;  // sigma2 * S11_2^-1  (full-model covariance slot)
    MatrixXd var_sub;   // sigma2 * S11^-1    (sub-model covariance slot)
};

DerivedSymbols derive_symbols(const AsymptoticInputs& inp);

// Asymptotic distributional bias vector of the beta1 estimator.
// Supported kinds: LiuFull, LiuSub, Pretest, Stein, PositivePart.
VectorXd bias(Estimator kind, const DerivedSymbols& sym, double alpha);

// B' S11_2 B, evaluated both from the bias vector and from the
// expanded per-estimator expressions; the two routes must agree.
double quadratic_bias(Estimator kind, const DerivedSymbols& sym, double alpha);

// Asymptotic covariance matrix of the beta1 estimator; symmetrized
// output, asymmetry before symmetrization is checked at 1e-8.
MatrixXd covariance(Estimator kind, const DerivedSymbols& sym, double alpha);

// tr(W Gamma(kind)), cross-checked against the expanded risk
// expressions (agreement enforced at 1e-8 relative).
double risk(Estimator kind, const DerivedSymbols& sym, const MatrixXd& W, double alpha);
double risk(Estimator kind, const AsymptoticInputs& inp, double alpha);

}  // namespace liureg
