#pragma once

namespace forkjoin {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a + 1, Lentz continued fraction otherwise;
// absolute accuracy around 1e-14.
double gamma_p(double a, double x);

double chi_square_cdf(double x, int dof);

// Inverse of chi_square_cdf in x, by bisection. p in (0, 1).
double chi_square_quantile(double p, int dof);

} // namespace forkjoin
