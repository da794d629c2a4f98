#include "liureg/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "liureg/distributions.hpp"

namespace liureg {

namespace {

MatrixXd solve_spd(const MatrixXd& A, const MatrixXd& rhs, const char* context) {
    Eigen::LDLT<MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= 1e-13 * ldlt.vectorD().maxCoeff()) {
        throw std::runtime_error(std::string(context) + ": block numerically singular");
    }
    return ldlt.solve(rhs);
}

MatrixXd inverse_spd(const MatrixXd& A, const char* context) {
    return solve_spd(A, MatrixXd::Identity(A.rows(), A.cols()), context);
}

MatrixXd sym_outer(const VectorXd& a, const VectorXd& b) {
    return a * b.transpose() + b * a.transpose();
}

void require_combiner_dims(Estimator kind, int p2, const char* where) {
    if ((kind == Estimator::Stein || kind == Estimator::PositivePart) && p2 < 3) {
        throw std::invalid_argument(std::string(where) + ": p2 >= 3 required for " +
                                    estimator_label(kind));
    }
}

// All chi-square functionals the Theorem-level formulas consume,
// evaluated once per (p2, Delta, alpha).
struct ChiSqTerms {
    double c_alpha;
    double H2_c, H4_c;   // CDF at the pretest critical value
    double H2_r, H4_r;   // CDF at r = p2 - 2
    double E2, E2_4;     // first inverse moments, dof p2+2 / p2+4
    double E4_2, E4_4;   // second inverse moments
    double E1I2_le, E1I4_le, E1I2_gt;  // truncated first inverse moments at r
    double E4I2_le, E4I4_le;           // truncated second inverse moments at r
    double Eg2, Eg4;     // E[(1 - r/t) I(t <= r)]
};

ChiSqTerms chisq_terms(int p2, double Delta, double alpha) {
    ChiSqTerms t{};
    const double r = p2 - 2;
    t.c_alpha = chisq_quantile(p2, alpha);
    t.H2_c = ncchisq_cdf(p2 + 2, Delta, t.c_alpha);
    t.H4_c = ncchisq_cdf(p2 + 4, Delta, t.c_alpha);
    if (p2 >= 3) {
        t.H2_r = ncchisq_cdf(p2 + 2, Delta, r);
        t.H4_r = ncchisq_cdf(p2 + 4, Delta, r);
        t.E2 = inv_moment(p2 + 2, Delta, 1);
        t.E2_4 = inv_moment(p2 + 4, Delta, 1);
        t.E4_2 = inv_moment(p2 + 2, Delta, 2);
        t.E4_4 = inv_moment(p2 + 4, Delta, 2);
        t.E1I2_le = trunc_inv_moment(p2 + 2, Delta, 1, r, TailSide::LessEqual);
        t.E1I4_le = trunc_inv_moment(p2 + 4, Delta, 1, r, TailSide::LessEqual);
        t.E1I2_gt = trunc_inv_moment(p2 + 2, Delta, 1, r, TailSide::Greater);
        t.E4I2_le = trunc_inv_moment(p2 + 2, Delta, 2, r, TailSide::LessEqual);
        t.E4I4_le = trunc_inv_moment(p2 + 4, Delta, 2, r, TailSide::LessEqual);
        t.Eg2 = t.H2_r - r * t.E1I2_le;
        t.Eg4 = t.H4_r - r * t.E1I4_le;
    }
    return t;
}

}  // namespace

void AsymptoticInputs::validate() const {
    const int pp = p();
    if (pp < 2 || p2() < 1 || p1() < 1) {
        throw std::invalid_argument("AsymptoticInputs: need p1 >= 1 and p2 >= 1");
    }
    if (C.rows() != C.cols()) throw std::invalid_argument("AsymptoticInputs: C not square");
    if (!C.isApprox(C.transpose(), 1e-10)) {
        throw std::invalid_argument("AsymptoticInputs: C not symmetric");
    }
    if (beta.size() != pp) throw std::invalid_argument("AsymptoticInputs: beta length mismatch");
    if (W.rows() != p1() || W.cols() != p1()) {
        throw std::invalid_argument("AsymptoticInputs: W must be p1 x p1");
    }
    if (!(sigma2 > 0.0)) throw std::invalid_argument("AsymptoticInputs: sigma2 must be > 0");
    if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("AsymptoticInputs: d outside (0,1]");
    Eigen::LDLT<MatrixXd> ldlt(C);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
        throw std::invalid_argument("AsymptoticInputs: C not positive definite");
    }
}

DerivedSymbols derive_symbols(const AsymptoticInputs& inp) {
    inp.validate();
    const int p1 = inp.p1();
    const int p2 = inp.p2();
    const int p = p1 + p2;

    const MatrixXd I_p = MatrixXd::Identity(p, p);
    const MatrixXd I_1 = MatrixXd::Identity(p1, p1);

    const MatrixXd C11 = inp.C.topLeftCorner(p1, p1);
    const MatrixXd C12 = inp.C.topRightCorner(p1, p2);
    const MatrixXd C21 = inp.C.bottomLeftCorner(p2, p1);
    const MatrixXd C22 = inp.C.bottomRightCorner(p2, p2);

    DerivedSymbols s;
    s.p1 = p1;
    s.p2 = p2;
    s.sigma2 = inp.sigma2;
    s.d = inp.d;

    s.F_d = solve_spd(inp.C + I_p, inp.C + inp.d * I_p, "derive_symbols: C + I");
    s.F_d11 = solve_spd(C11 + I_1, C11 + inp.d * I_1, "derive_symbols: C11 + I");

    const MatrixXd Cinv = inverse_spd(inp.C, "derive_symbols: C");
    s.S = s.F_d * Cinv * s.F_d.transpose();
    s.S11 = s.S.topLeftCorner(p1, p1);
    s.S12 = s.S.topRightCorner(p1, p2);
    s.S21 = s.S.bottomLeftCorner(p2, p1);
    s.S22 = s.S.bottomRightCorner(p2, p2);
    s.S11_2 = s.S11 - s.S12 * solve_spd(s.S22, s.S21, "derive_symbols: S22");
    s.S22_1 = s.S22 - s.S21 * solve_spd(s.S11, s.S12, "derive_symbols: S11");

    s.mu = -(1.0 - inp.d) * solve_spd(inp.C + I_p, inp.beta, "derive_symbols: C + I");
    const VectorXd mu1 = s.mu.head(p1);
    const VectorXd mu2 = s.mu.tail(p2);
    const VectorXd beta2 = inp.beta.tail(p2);
    s.mu_11_2 =
        mu1 - C12 * solve_spd(C22, (beta2 - inp.kappa) - mu2, "derive_symbols: C22");
    s.delta = s.F_d11 * (C12 * inp.kappa);
    s.gamma = -(s.mu_11_2 + s.delta);
    s.Phi = inp.sigma2 * s.F_d11 * C12 *
            solve_spd(s.S22_1, C21 * s.F_d11, "derive_symbols: S22.1");

    const MatrixXd C22_1 = C22 - C21 * solve_spd(C11, C12, "derive_symbols: C11");
    const VectorXd c22_1_inv_kappa = solve_spd(C22_1, inp.kappa, "derive_symbols: C22.1");
    s.Delta = inp.kappa.dot(c22_1_inv_kappa) / inp.sigma2;

    s.var_full = inp.sigma2 * inverse_spd(s.S11_2, "derive_symbols: S11.2");
    s.var_sub = inp.sigma2 * inverse_spd(s.S11, "derive_symbols: S11");
    return s;
}

VectorXd bias(Estimator kind, const DerivedSymbols& sym, double alpha) {
    require_combiner_dims(kind, sym.p2, "bias");
    const double r = sym.p2 - 2;
    switch (kind) {
        case Estimator::LiuFull:
            return -sym.mu_11_2;
        case Estimator::LiuSub:
            return -sym.gamma;
        case Estimator::Pretest: {
            const double H2c = ncchisq_cdf(sym.p2 + 2, sym.Delta, chisq_quantile(sym.p2, alpha));
            return -sym.mu_11_2 - sym.delta * H2c;
        }
        case Estimator::Stein:
            return -sym.mu_11_2 - r * inv_moment(sym.p2 + 2, sym.Delta, 1) * sym.delta;
        case Estimator::PositivePart: {
            const double K = ncchisq_cdf(sym.p2 + 2, sym.Delta, r) +
                             r * trunc_inv_moment(sym.p2 + 2, sym.Delta, 1, r,
                                                  TailSide::Greater);
            return -sym.mu_11_2 - K * sym.delta;
        }
        default:
            throw std::invalid_argument(std::string("bias: unsupported kind ") +
                                        estimator_label(kind));
    }
}

double quadratic_bias(Estimator kind, const DerivedSymbols& sym, double alpha) {
    require_combiner_dims(kind, sym.p2, "quadratic_bias");
    const VectorXd b = bias(kind, sym, alpha);
    const double compact = b.dot(sym.S11_2 * b);

    // expanded forms, written with the scalar multiplier each theorem
    // attaches to delta
    const double mSm = sym.mu_11_2.dot(sym.S11_2 * sym.mu_11_2);
    const double mSd = sym.mu_11_2.dot(sym.S11_2 * sym.delta);
    const double dSd = sym.delta.dot(sym.S11_2 * sym.delta);
    const double r = sym.p2 - 2;
    double expanded;
    switch (kind) {
        case Estimator::LiuFull:
            expanded = mSm;
            break;
        case Estimator::LiuSub:
            expanded = sym.gamma.dot(sym.S11_2 * sym.gamma);
            break;
        case Estimator::Pretest: {
            const double H2c =
                ncchisq_cdf(sym.p2 + 2, sym.Delta, chisq_quantile(sym.p2, alpha));
            expanded = mSm + 2.0 * mSd * H2c + dSd * H2c * H2c;
            break;
        }
        case Estimator::Stein: {
            const double E2 = inv_moment(sym.p2 + 2, sym.Delta, 1);
            expanded = mSm + 2.0 * r * mSd * E2 + r * r * dSd * E2 * E2;
            break;
        }
        case Estimator::PositivePart: {
            const double K =
                ncchisq_cdf(sym.p2 + 2, sym.Delta, r) +
                r * trunc_inv_moment(sym.p2 + 2, sym.Delta, 1, r, TailSide::Greater);
            expanded = mSm + 2.0 * mSd * K + dSd * K * K;
            break;
        }
        default:
            throw std::invalid_argument("quadratic_bias: unsupported kind");
    }

    const double scale = std::max({1.0, std::fabs(compact), std::fabs(expanded)});
    if (std::fabs(compact - expanded) > 1e-10 * scale) {
        throw std::runtime_error("quadratic_bias: compact and expanded routes disagree (" +
                                 std::to_string(compact) + " vs " + std::to_string(expanded) +
                                 ")");
    }
    return compact;
}

MatrixXd covariance(Estimator kind, const DerivedSymbols& sym, double alpha) {
    require_combiner_dims(kind, sym.p2, "covariance");
    const ChiSqTerms t = chisq_terms(sym.p2, sym.Delta, alpha);
    const double r = sym.p2 - 2;
    const MatrixXd dd = sym.delta * sym.delta.transpose();

    MatrixXd G;
    switch (kind) {
        case Estimator::LiuFull:
            G = sym.var_full + sym.mu_11_2 * sym.mu_11_2.transpose();
            break;
        case Estimator::LiuSub:
            G = sym.var_sub + sym.gamma * sym.gamma.transpose();
            break;
        case Estimator::Pretest:
            G = covariance(Estimator::LiuFull, sym, alpha) +
                sym_outer(sym.mu_11_2, sym.delta) * t.H2_c - sym.Phi * t.H2_c +
                dd * (2.0 * t.H2_c - t.H4_c);
            break;
        case Estimator::Stein:
            G = covariance(Estimator::LiuFull, sym, alpha) +
                r * sym_outer(sym.mu_11_2, sym.delta) * t.E2 -
                r * sym.Phi * (2.0 * t.E2 - r * t.E4_2) +
                r * dd * (2.0 * t.E2 - 2.0 * t.E2_4 + r * t.E4_4);
            break;
        case Estimator::PositivePart:
            G = covariance(Estimator::Stein, sym, alpha) +
                sym_outer(sym.delta, sym.mu_11_2) * t.Eg2 + 2.0 * dd * t.Eg2 -
                2.0 * sym.Phi * t.Eg2 - 2.0 * dd * t.Eg4 -
                r * r * (sym.Phi * t.E4I2_le + dd * t.E4I4_le) + sym.Phi * t.H2_r +
                dd * t.H4_r;
            break;
        default:
            throw std::invalid_argument(std::string("covariance: unsupported kind ") +
                                        estimator_label(kind));
    }

    const double asym = (G - G.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(1.0, G.cwiseAbs().maxCoeff())) {
        throw std::runtime_error("covariance: asymmetry " + std::to_string(asym) +
                                 " above tolerance before symmetrization");
    }
    return 0.5 * (G + G.transpose());
}

double risk(Estimator kind, const DerivedSymbols& sym, const MatrixXd& W, double alpha) {
    require_combiner_dims(kind, sym.p2, "risk");
    if (W.rows() != sym.p1 || W.cols() != sym.p1) {
        throw std::invalid_argument("risk: W must be p1 x p1");
    }
    const double traced = (W * covariance(kind, sym, alpha)).trace();

    // expanded Theorem-level scalar expressions
    const ChiSqTerms t = chisq_terms(sym.p2, sym.Delta, alpha);
    const double r = sym.p2 - 2;
    const double mWd = sym.mu_11_2.dot(W * sym.delta);
    const double dWd = sym.delta.dot(W * sym.delta);
    const double trWPhi = (W * sym.Phi).trace();
    const double r_lfm =
        (W * sym.var_full).trace() + sym.mu_11_2.dot(W * sym.mu_11_2);

    double expanded;
    switch (kind) {
        case Estimator::LiuFull:
            expanded = r_lfm;
            break;
        case Estimator::LiuSub:
            expanded = (W * sym.var_sub).trace() + sym.gamma.dot(W * sym.gamma);
            break;
        case Estimator::Pretest:
            expanded = r_lfm + 2.0 * mWd * t.H2_c - trWPhi * t.H2_c +
                       dWd * (2.0 * t.H2_c - t.H4_c);
            break;
        case Estimator::Stein:
            expanded = r_lfm + 2.0 * r * mWd * t.E2 -
                       r * trWPhi * (2.0 * t.E2 - r * t.E4_2) +
                       r * dWd * (2.0 * t.E2 - 2.0 * t.E2_4 + r * t.E4_4);
            break;
        case Estimator::PositivePart:
            expanded = risk(Estimator::Stein, sym, W, alpha) + 2.0 * mWd * t.Eg2 +
                       2.0 * dWd * t.Eg2 - 2.0 * trWPhi * t.Eg2 - 2.0 * dWd * t.Eg4 -
                       r * r * (trWPhi * t.E4I2_le + dWd * t.E4I4_le) +
                       trWPhi * t.H2_r + dWd * t.H4_r;
            break;
        default:
            throw std::invalid_argument("risk: unsupported kind");
    }

    const double scale = std::max({1.0, std::fabs(traced), std::fabs(expanded)});
    if (std::fabs(traced - expanded) > 1e-8 * scale) {
        throw std::runtime_error("risk: trace and expanded routes disagree (" +
                                 std::to_string(traced) + " vs " + std::to_string(expanded) +
                                 ") for " + estimator_label(kind));
    }
    return traced;
}

double risk(Estimator kind, const AsymptoticInputs& inp, double alpha) {
    return risk(kind, derive_symbols(inp), inp.W, alpha);
}

}  // namespace liureg
