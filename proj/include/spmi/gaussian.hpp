#pragma once

namespace spmi {

// Standard normal CDF Phi(x), accurate to ~1e-16 relative via erfc.
double normal_cdf(double x);

// Standard normal quantile Phi^{-1}(p) for p in [0, 1]; p = 0 and p = 1
// return -inf / +inf. Accurate to ~1e-15 (rational approximation plus one
// Halley refinement). Throws InvalidParameterError outside [0, 1].
double normal_quantile(double p);

// Upper-orthant probability L(h, k, rho) = Pr(X > h, Y > k) for a standard
// bivariate normal pair with correlation rho. Accepts +-inf sentinels in
// h and k. Absolute error <= 1e-7 (in practice ~1e-15 away from |rho| ~ 1).
// Throws InvalidParameterError for |rho| >= 1 or NaN inputs.
double bvn_upper(double h, double k, double rho);

// Bivariate normal CDF Pr(X <= x, Y <= y); same contract as bvn_upper.
double bvn_cdf(double x, double y, double rho);

}  // namespace spmi
