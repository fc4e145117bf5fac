// Log-gamma arithmetic, regularised incomplete beta/gamma, and the
// distribution functions the test statistics need.  All ratios of gamma
// functions are formed in log space.
#pragma once

namespace pgsim {

double log_gamma(double x);              // x > 0
double log_beta(double a, double b);
double log_rising(double x, double n);   // log of (x)_n = Gamma(x+n)/Gamma(x), x > 0, x+n > 0

// Regularised incomplete gamma: P(a,x) lower, Q(a,x) = 1 - P(a,x) upper.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularised incomplete beta I_x(a,b).
double beta_inc(double a, double b, double x);

double beta_cdf(double a, double b, double x);
double gamma_cdf(double shape, double x);
double exponential_cdf(double x);
double levy_stable_half_cdf(double x);   // S_{1/2} with E[e^{-wS}] = e^{-sqrt(w)}
double beta_pdf(double a, double b, double x);

// Kolmogorov asymptotic tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

// Upper tail of chi-square with k degrees of freedom.
double chi2_sf(double x, int k);

}  // namespace pgsim
