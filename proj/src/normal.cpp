#include "normal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wbb {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994606;
constexpr double kInvSqrt2 = 0.70710678118654752440084436;

void require_finite(double x, const char* where) {
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(where) + ": non-finite argument");
    }
}

} // namespace

double std_normal_pdf(double x) {
    require_finite(x, "std_normal_pdf");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
    require_finite(x, "std_normal_cdf");
    // The complementary error function keeps the relative error bounded in
    // the lower tail, where a plain 1 - Phi(-x) would lose all digits.
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

StdNormalEval std_normal_eval(double x) {
    return StdNormalEval{x, std_normal_pdf(x), std_normal_cdf(x)};
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                      6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                    1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return (q < 0.0) ? -value : value;
}

double psi(double a) {
    require_finite(a, "psi");
    const double v = std_normal_pdf(a) + a * std_normal_cdf(a);
    // psi >= 0 holds exactly; far in the left tail the two terms cancel to a
    // few ulps and may round below zero.
    return v > 0.0 ? v : 0.0;
}

double psi_tilde(double a) {
    require_finite(a, "psi_tilde");
    if (a > 3.0) return a;
    if (a < -3.0) return std_normal_pdf(a) / (a * a);
    return psi(a);
}

} // namespace wbb
