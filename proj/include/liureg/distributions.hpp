#pragma once

namespace liureg {

enum class TailSide { LessEqual, Greater };

// CDF H_v(x; delta) of the noncentral chi-square with v degrees of
// freedom and noncentrality delta, as a Poisson(delta/2)-weighted
// mixture of central chi-square CDFs. Absolute error <= 1e-12.
double ncchisq_cdf(int v, double delta, double x);

// Density h_v(x; delta) of the noncentral chi-square.
double ncchisq_pdf(int v, double delta, double x);

// E[(chi^2_v(delta))^-j] for j in {1, 2}, via the Poisson mixture of
// central closed forms 1/(m-2) and 1/((m-2)(m-4)). Requires v > 2j.
double inv_moment(int v, double delta, int j);

// E[(chi^2_v(delta))^-j * I(chi^2_v(delta) <= c)] (or the > c side),
// by adaptive quadrature of x^-j against the noncentral density.
// j = 0 reduces to the CDF (or its complement).
double trunc_inv_moment(int v, double delta, int j, double c, TailSide side);

// Upper-alpha quantile of the central chi-square with v degrees of
// freedom: the x with 1 - H_v(x; 0) = alpha.
double chisq_quantile(int v, double alpha);

}  // namespace liureg
