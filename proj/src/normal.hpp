#pragma once

namespace wbb {

// Standard normal density, distribution function and their combinations used
// by the interval score.  All functions reject non-finite arguments.

struct StdNormalEval {
    double x;
    double pdf;
    double cdf;
};

double std_normal_pdf(double x);
double std_normal_cdf(double x);
StdNormalEval std_normal_eval(double x);

// Inverse of the standard normal c.d.f. for p in (0,1).  Wichura's AS 241
// (PPND16), full double precision.
double std_normal_quantile(double p);

// psi(a) = pdf(a) + a * cdf(a) = E (Y + a)^+ for Y ~ N(0,1).
double psi(double a);

// Tail-stabilized replacement for psi:
//   a              for a >  3,
//   a^-2 * pdf(a)  for a < -3,
//   psi(a)         otherwise.
// The definition is piecewise; the tiny jumps at +-3 are part of it.
double psi_tilde(double a);

} // namespace wbb
