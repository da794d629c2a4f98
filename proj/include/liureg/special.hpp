#pragma once

namespace liureg {

// Regularized lower incomplete gamma P(a, x) = gamma(a,x)/Gamma(a).
// Series for x < a+1, Lentz continued fraction otherwise. Absolute
// accuracy ~1e-14 over the ranges used here (a up to ~1e4).
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// CDF of the central chi-square with v degrees of freedom.
double chisq_cdf(double v, double x);

// log density of the central chi-square with v degrees of freedom.
double chisq_logpdf(double v, double x);

// Regularized incomplete beta I_x(a, b), continued fraction form.
double beta_inc(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with v degrees of freedom.
double student_t_two_sided_p(double t, double v);

}  // namespace liureg
