#pragma once

namespace prevsim::special {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, 0 <= x <= 1.
double beta_i(double a, double b, double x);

double chi_square_cdf(double x, double k);
double chi_square_sf(double x, double k);

double f_cdf(double x, double d1, double d2);
double f_sf(double x, double d1, double d2);

double t_cdf(double x, double df);
/// P(|T| >= |x|).
double t_two_sided_p(double x, double df);

}  // namespace prevsim::special
