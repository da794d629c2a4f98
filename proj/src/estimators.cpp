#include "liureg/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "liureg/distributions.hpp"

namespace liureg {

namespace {

// SPD solve with an explicit singularity check; context names the
// matrix in the error message.
MatrixXd solve_spd(const MatrixXd& A, const MatrixXd& rhs, const char* context) {
    Eigen::LDLT<MatrixXd> ldlt(A);
    const double dmax = ldlt.vectorD().maxCoeff();
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-13 * dmax) {
        throw std::runtime_error(std::string(context) + ": matrix numerically singular");
    }
    return ldlt.solve(rhs);
}

MatrixXd identity_like(const MatrixXd& A) {
    return MatrixXd::Identity(A.rows(), A.cols());
}

// Symmetric but possibly indefinite systems (the X1'M2X1 + I matrix is
// indefinite whenever the nuisance gram dominates the identity).
MatrixXd solve_sym(const MatrixXd& A, const MatrixXd& rhs, const char* context) {
    Eigen::FullPivLU<MatrixXd> lu(A);
    if (!lu.isInvertible()) {
        throw std::runtime_error(std::string(context) + ": matrix numerically singular");
    }
    return lu.solve(rhs);
}

void check_d(double d, const char* context) {
    if (!(d > 0.0 && d <= 1.0)) {
        throw std::invalid_argument(std::string(context) + ": d must lie in (0, 1], got " +
                                    std::to_string(d));
    }
}

}  // namespace

const char* estimator_label(Estimator e) {
    switch (e) {
        case Estimator::Lse: return "LSE";
        case Estimator::RidgeFull: return "RidgeFM";
        case Estimator::RidgeSub: return "RidgeSM";
        case Estimator::LiuFull: return "LFM";
        case Estimator::LiuSub: return "LSM";
        case Estimator::Pretest: return "LPT";
        case Estimator::Stein: return "LS";
        case Estimator::PositivePart: return "LPS";
        case Estimator::Lasso: return "Lasso";
        case Estimator::AdaptiveLasso: return "aLasso";
        case Estimator::Scad: return "SCAD";
    }
    return "?";
}

Estimator estimator_from_label(const std::string& label) {
    for (Estimator e : {Estimator::Lse, Estimator::RidgeFull, Estimator::RidgeSub,
                        Estimator::LiuFull, Estimator::LiuSub, Estimator::Pretest,
                        Estimator::Stein, Estimator::PositivePart, Estimator::Lasso,
                        Estimator::AdaptiveLasso, Estimator::Scad}) {
        if (label == estimator_label(e)) return e;
    }
    throw std::invalid_argument("unknown estimator label: " + label);
}

void ShrinkageConfig::validate() const {
    check_d(d, "ShrinkageConfig.d");
    check_d(d1, "ShrinkageConfig.d1");
    if (lambda_r < 0.0 || lambda_r1 < 0.0) {
        throw std::invalid_argument("ShrinkageConfig: ridge penalties must be >= 0");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("ShrinkageConfig: alpha must lie in (0, 1)");
    }
}

VectorXd lse(const MatrixXd& X, const VectorXd& y) {
    return solve_spd(X.transpose() * X, X.transpose() * y, "lse: X'X");
}

VectorXd ridge(const MatrixXd& X, const VectorXd& y, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge: lambda must be >= 0");
    const MatrixXd gram = X.transpose() * X;
    return solve_spd(gram + lambda * identity_like(gram), X.transpose() * y,
                     "ridge: X'X + lambda I");
}

VectorXd liu_full(const MatrixXd& X, const VectorXd& y, double d) {
    check_d(d, "liu_full");
    const MatrixXd gram = X.transpose() * X;
    const VectorXd b = solve_spd(gram, X.transpose() * y, "liu_full: X'X");
    const MatrixXd I = identity_like(gram);
    return solve_spd(gram + I, (gram + d * I) * b, "liu_full: X'X + I");
}

VectorXd liu_sub_beta1(const PartitionedDesign& pd, const VectorXd& y, double d1) {
    check_d(d1, "liu_sub_beta1");
    const VectorXd b = solve_spd(pd.x1tx1, pd.X1.transpose() * y, "liu_sub_beta1: X1'X1");
    const MatrixXd I = identity_like(pd.x1tx1);
    return solve_spd(pd.x1tx1 + I, (pd.x1tx1 + d1 * I) * b, "liu_sub_beta1: X1'X1 + I");
}

VectorXd liu_full_beta1(const PartitionedDesign& pd, const VectorXd& y, double d,
                        LiuFullVariant variant) {
    check_d(d, "liu_full_beta1");
    const Eigen::Index n = pd.n();

    MatrixXd M2L = MatrixXd::Identity(n, n);
    MatrixXd M2 = MatrixXd::Identity(n, n);
    if (pd.p2() > 0) {
        const MatrixXd g2 = pd.X2.transpose() * pd.X2;
        const MatrixXd I2 = identity_like(g2);
        // M2L = I - X2 (X2'X2 + I)^-1 (X2'X2 + d I) X2'
        M2L -= pd.X2 * solve_spd(g2 + I2, (g2 + d * I2) * pd.X2.transpose(),
                                 "liu_full_beta1: X2'X2 + I");
        if (variant == LiuFullVariant::Unrestricted) {
            M2 -= pd.X2 * solve_spd(g2, pd.X2.transpose(), "liu_full_beta1: X2'X2");
        }
    }

    VectorXd base;
    if (variant == LiuFullVariant::AsPrinted) {
        base = solve_spd(pd.x1tx1, pd.X1.transpose() * y, "liu_full_beta1: X1'X1");
    } else {
        const MatrixXd A2 = pd.X1.transpose() * M2 * pd.X1;
        base = solve_spd(A2, pd.X1.transpose() * M2 * y, "liu_full_beta1: X1'M2X1");
    }

    const MatrixXd A = pd.X1.transpose() * M2L * pd.X1;
    const MatrixXd I1 = identity_like(A);
    return solve_sym(A + I1, (A + d * I1) * base, "liu_full_beta1: X1'M2X1 + I");
}

VectorXd ridge_full_beta1(const PartitionedDesign& pd, const VectorXd& y, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge_full_beta1: lambda must be >= 0");
    const Eigen::Index n = pd.n();
    MatrixXd M2R = MatrixXd::Identity(n, n);
    if (pd.p2() > 0) {
        const MatrixXd g2 = pd.X2.transpose() * pd.X2;
        M2R -= pd.X2 * solve_spd(g2 + lambda * identity_like(g2), pd.X2.transpose(),
                                 "ridge_full_beta1: X2'X2 + lambda I");
    }
    const MatrixXd A = pd.X1.transpose() * M2R * pd.X1;
    return solve_spd(A + lambda * identity_like(A), pd.X1.transpose() * M2R * y,
                     "ridge_full_beta1: X1'M2X1 + lambda I");
}

VectorXd ridge_sub_beta1(const MatrixXd& X1, const VectorXd& y, double lambda1) {
    return ridge(X1, y, lambda1);
}

double sigma2_hat(const MatrixXd& X, const VectorXd& y, const VectorXd& beta_lfm) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n <= p) throw std::invalid_argument("sigma2_hat: requires n > p");
    if (beta_lfm.size() != p) throw std::invalid_argument("sigma2_hat: beta length mismatch");
    const VectorXd r = y - X * beta_lfm;
    return r.squaredNorm() / static_cast<double>(n - p);
}

double test_statistic(const PartitionedDesign& pd, const VectorXd& y, double sigma2) {
    if (pd.p2() < 1) throw std::invalid_argument("test_statistic: requires p2 >= 1");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("test_statistic: sigma2 must be > 0");
    const VectorXd rhs = pd.X2.transpose() * (pd.M1 * y);
    const VectorXd b2 = solve_spd(pd.x2t_m1_x2, rhs, "test_statistic: X2'M1X2");
    // quadratic form b2' (X2'M1X2) b2 = b2' rhs, guaranteed >= 0
    return std::max(0.0, b2.dot(rhs)) / sigma2;
}

VectorXd pretest(const VectorXd& lfm, const VectorXd& lsm, double L_n, int p2,
                 double alpha) {
    if (p2 < 1) throw std::invalid_argument("pretest: requires p2 >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("pretest: alpha must lie in (0, 1)");
    }
    const double c = chisq_quantile(p2, alpha);
    return L_n <= c ? lsm : lfm;
}

VectorXd stein(const VectorXd& lfm, const VectorXd& lsm, double L_n, int p2) {
    if (p2 < 3) {
        throw std::invalid_argument("stein: requires p2 >= 3, got p2=" + std::to_string(p2));
    }
    if (L_n <= 0.0) {
        throw std::invalid_argument(
            "stein: L_n = 0 makes the shrink factor undefined; use pretest instead");
    }
    const double factor = 1.0 - static_cast<double>(p2 - 2) / L_n;
    return lsm + factor * (lfm - lsm);
}

VectorXd positive_part(const VectorXd& lfm, const VectorXd& lsm, double L_n, int p2) {
    if (p2 < 3) {
        throw std::invalid_argument("positive_part: requires p2 >= 3, got p2=" +
                                    std::to_string(p2));
    }
    if (L_n <= 0.0) {
        throw std::invalid_argument(
            "positive_part: L_n = 0 makes the shrink factor undefined; use pretest instead");
    }
    if (L_n <= static_cast<double>(p2 - 2)) return lsm;
    return stein(lfm, lsm, L_n, p2);
}

double estimate_d(const MatrixXd& X, const VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n <= p) throw std::invalid_argument("estimate_d: requires n > p");

    const MatrixXd gram = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw std::runtime_error("estimate_d: X'X not positive definite");
    }
    const VectorXd lambda = es.eigenvalues();
    const VectorXd beta = solve_spd(gram, X.transpose() * y, "estimate_d: X'X");
    const VectorXd alpha_hat = es.eigenvectors().transpose() * beta;
    const double s2 = (y - X * beta).squaredNorm() / static_cast<double>(n - p);

    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        num += 1.0 / (lambda(j) * (lambda(j) + 1.0));
        den += alpha_hat(j) * alpha_hat(j) / ((lambda(j) + 1.0) * (lambda(j) + 1.0));
    }
    if (den <= 1e-300) return 1.0;
    const double d = 1.0 - s2 * num / den;
    return std::min(1.0, std::max(0.01, d));
}

double ridge_gcv_lambda(const MatrixXd& X, const VectorXd& y) {
    const Eigen::Index n = X.rows();
    const MatrixXd gram = X.transpose() * X;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("ridge_gcv_lambda: eigen decomposition failed");
    }
    const VectorXd ev = es.eigenvalues();
    const VectorXd z = es.eigenvectors().transpose() * (X.transpose() * y);
    const double yty = y.squaredNorm();

    double best_lambda = 1e-4;
    double best_gcv = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 50; ++k) {
        const double lambda = std::pow(10.0, -4.0 + 6.0 * k / 49.0);
        double rss = yty;
        double trace_h = 0.0;
        for (Eigen::Index j = 0; j < ev.size(); ++j) {
            const double denom = ev(j) + lambda;
            rss += -2.0 * z(j) * z(j) / denom + ev(j) * z(j) * z(j) / (denom * denom);
            trace_h += ev(j) / denom;
        }
        const double dof = static_cast<double>(n) - trace_h;
        const double gcv = static_cast<double>(n) * std::max(rss, 0.0) / (dof * dof);
        if (gcv < best_gcv) {
            best_gcv = gcv;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

LiuFamilyFit fit_liu_family(const MatrixXd& X, const VectorXd& y,
                            const PartitionSpec& spec, const ShrinkageConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = X.rows();

    MatrixXd Xf = X;
    VectorXd yf = y;
    if (cfg.scaled_fit) {
        const double s = 1.0 / std::sqrt(static_cast<double>(n));
        Xf *= s;
        yf *= s;
    }

    Dataset data{yf, Xf, {}, {}};
    const PartitionedDesign pd = partition(data, spec);

    LiuFamilyFit fit;
    if (cfg.d_mode == DMode::Estimated) {
        fit.d = estimate_d(Xf, yf);
        fit.d1 = fit.d;
    } else {
        fit.d = cfg.d;
        fit.d1 = cfg.d1;
    }

    fit.joint_liu = liu_full(Xf, yf, fit.d);
    double s2 = sigma2_hat(Xf, yf, fit.joint_liu);
    fit.L_n = test_statistic(pd, yf, s2);
    // report sigma2 on the raw-data scale
    fit.sigma2 = cfg.scaled_fit ? s2 * static_cast<double>(n) : s2;

    fit.lfm = liu_full_beta1(pd, yf, fit.d, cfg.liu_variant);
    fit.lsm = liu_sub_beta1(pd, yf, fit.d1);
    fit.lpt = pretest(fit.lfm, fit.lsm, fit.L_n, pd.p2(), cfg.alpha);
    if (pd.p2() >= 3 && fit.L_n > 0.0) {
        fit.ls = stein(fit.lfm, fit.lsm, fit.L_n, pd.p2());
        fit.lps = positive_part(fit.lfm, fit.lsm, fit.L_n, pd.p2());
    }
    return fit;
}

}  // namespace liureg
