#include "liureg/distributions.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "liureg/integrate.hpp"
#include "liureg/special.hpp"

namespace liureg {

namespace {

constexpr int kSeriesCap = 10000;      // Poisson mixture term cap
constexpr double kTailMass = 1e-15;    // mixture tail mass cut
constexpr double kPanelEdge = 1e-2;    // singular panel width for x^-j integrands

// Poisson(delta/2)-weighted mixture, summed outward from the mode so
// large noncentralities stay stable. term(k) must be bounded.
double poisson_mixture(double delta, const std::function<double(int)>& term) {
    const double hd = 0.5 * delta;
    if (hd <= 0.0) return term(0);
    const int k0 = static_cast<int>(hd);
    const double w0 = std::exp(-hd + k0 * std::log(hd) - std::lgamma(k0 + 1.0));
    double acc = w0 * term(k0);
    double mass = w0;
    double wu = w0, wd = w0;
    int ku = k0, kd = k0;
    for (int it = 0; it < kSeriesCap; ++it) {
        bool advanced = false;
        if (wu > 0.0) {
            wu *= hd / static_cast<double>(ku + 1);
            ++ku;
            if (wu > 1e-18) {
                acc += wu * term(ku);
                mass += wu;
                advanced = true;
            } else {
                wu = 0.0;
            }
        }
        if (wd > 0.0 && kd > 0) {
            wd *= static_cast<double>(kd) / hd;
            --kd;
            if (wd > 1e-18) {
                acc += wd * term(kd);
                mass += wd;
                advanced = true;
            } else {
                wd = 0.0;
            }
        }
        if (!advanced || mass >= 1.0 - kTailMass) break;
    }
    return acc;
}

void check_vd(int v, double delta, const char* where) {
    if (v < 1) throw std::invalid_argument(std::string(where) + ": v must be >= 1");
    if (delta < 0.0) throw std::invalid_argument(std::string(where) + ": delta must be >= 0");
}

// Exact integral of x^-j against the central chi-square_m density over
// (a, b], via regularized incomplete gammas. Needs m > 2j.
double central_inv_partial(int m, int j, double a, double b) {
    const double s = 0.5 * m - j;
    const double logc = -j * std::log(2.0) + std::lgamma(s) - std::lgamma(0.5 * m);
    const double pa = a <= 0.0 ? 0.0 : gamma_p(s, 0.5 * a);
    const double pb = gamma_p(s, 0.5 * b);
    return std::exp(logc) * (pb - pa);
}

}  // namespace

double ncchisq_cdf(int v, double delta, double x) {
    check_vd(v, delta, "ncchisq_cdf");
    if (x <= 0.0) return 0.0;
    const double r = poisson_mixture(
        delta, [&](int k) { return chisq_cdf(v + 2.0 * k, x); });
    return std::min(1.0, std::max(0.0, r));
}

double ncchisq_pdf(int v, double delta, double x) {
    check_vd(v, delta, "ncchisq_pdf");
    if (x <= 0.0) return 0.0;
    return poisson_mixture(
        delta, [&](int k) { return std::exp(chisq_logpdf(v + 2.0 * k, x)); });
}

double inv_moment(int v, double delta, int j) {
    check_vd(v, delta, "inv_moment");
    if (j != 1 && j != 2) throw std::invalid_argument("inv_moment: j must be 1 or 2");
    if (v <= 2 * j) {
        throw std::invalid_argument("inv_moment: moment infinite, needs v > 2j (v=" +
                                    std::to_string(v) + ", j=" + std::to_string(j) + ")");
    }
    const auto central = [&](int k) -> double {
        const double m = v + 2.0 * k;
        return j == 1 ? 1.0 / (m - 2.0) : 1.0 / ((m - 2.0) * (m - 4.0));
    };
    return poisson_mixture(delta, central);
}

double trunc_inv_moment(int v, double delta, int j, double c, TailSide side) {
    check_vd(v, delta, "trunc_inv_moment");
    if (c <= 0.0) throw std::invalid_argument("trunc_inv_moment: c must be > 0");
    if (j < 0 || j > 2) throw std::invalid_argument("trunc_inv_moment: j must be in {0,1,2}");

    if (j == 0) {
        const double h = ncchisq_cdf(v, delta, c);
        return side == TailSide::LessEqual ? h : 1.0 - h;
    }
    if (side == TailSide::LessEqual && v <= 2 * j) {
        throw std::invalid_argument("trunc_inv_moment: needs v > 2j on the lower side");
    }

    const auto integrand = [&](double x) {
        return std::pow(x, -j) * ncchisq_pdf(v, delta, x);
    };

    // The x^-j factor is singular (or steep) at 0; anything below
    // kPanelEdge is handled by the exact mixture of central partial
    // moments instead of quadrature.
    const auto panel_below = [&](double a, double b) {
        return poisson_mixture(
            delta, [&](int k) { return central_inv_partial(v + 2 * k, j, a, b); });
    };

    double lo, hi;
    double analytic = 0.0;
    if (side == TailSide::LessEqual) {
        if (c <= kPanelEdge) return panel_below(0.0, c);
        analytic = panel_below(0.0, kPanelEdge);
        lo = kPanelEdge;
        hi = c;
    } else {
        lo = c;
        if (c < kPanelEdge) {
            analytic = panel_below(c, kPanelEdge);
            lo = kPanelEdge;
        }
        // generous upper end: noncentral mass beyond is < 1e-16
        const double mean = v + delta;
        hi = mean + 50.0 * std::sqrt(2.0 * (v + 2.0 * delta)) + 100.0;
        if (hi <= lo) return analytic;
    }

    const QuadratureResult q = integrate_adaptive(integrand, lo, hi, 1e-13, 1e-10);
    if (!q.converged) {
        throw std::runtime_error(
            "trunc_inv_moment: quadrature did not converge, achieved error estimate " +
            std::to_string(q.error_estimate));
    }
    return analytic + q.value;
}

double chisq_quantile(int v, double alpha) {
    if (v < 1) throw std::invalid_argument("chisq_quantile: v must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("chisq_quantile: alpha must lie in (0,1)");
    }
    const double target = 1.0 - alpha;
    double lo = 0.0;
    double hi = v + 10.0;
    while (chisq_cdf(v, hi) < target) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (chisq_cdf(v, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace liureg
