#pragma once

#include <functional>

namespace pairscore {

/// Standard normal density.
double norm_pdf(double x);

/// Standard normal CDF via erfc; accurate to machine precision.
double norm_cdf(double x);

/// Inverse standard normal CDF, rational approximation refined by one
/// Halley step; |error| < 1e-15 over (0, 1).
double norm_quantile(double p);

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation rho.
/// Gauss-Legendre evaluation of the arcsin integral with the usual
/// near-singular reduction for |rho| > 0.925; absolute error well below 5e-7.
double bivariate_norm_cdf(double h, double k, double rho);

/// Brent scalar minimization on [lo, hi]; returns the argmin. Tolerance is
/// on the argument. The function must be continuous.
double brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-10, int max_iter = 200);

} // namespace pairscore
