#ifndef QUANTBAND_SPECIAL_HPP
#define QUANTBAND_SPECIAL_HPP

namespace quantband {

// Standard normal distribution function.
double norm_cdf(double x);

// Standard normal density.
double norm_pdf(double x);

// Inverse of the standard normal distribution function (Wichura's
// algorithm, accurate to full double precision on (0,1)).
// Returns -inf at p == 0 and +inf at p == 1; throws outside [0,1].
double norm_inv(double p);

// Regularized upper incomplete gamma function Q(a, x) = Gamma(a,x)/Gamma(a)
// for a > 0, x >= 0, computed by series or continued fraction.
double gamma_q(double a, double x);

// log of the Poisson point mass at integer k >= 0 with rate lambda > 0.
double poisson_log_pmf(double lambda, double k);

// Poisson distribution function P(Y <= y) at rate lambda >= 0.
// Non-integer y is floored.  y < 0 gives 0.  Uses log-space summation of
// point masses for y <= 10*lambda + 50 and the regularized incomplete
// gamma continuation beyond.
double poisson_cdf(double lambda, double y);

}  // namespace quantband

#endif  // QUANTBAND_SPECIAL_HPP
