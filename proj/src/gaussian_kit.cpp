#include "dcvar/gaussian_kit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dcvar/error.hpp"

namespace dcvar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Beyond this many standard deviations the H functionals saturate.
constexpr double kClampSd = 40.0;

// Acklam's rational approximation, relative error about 1.15e-9.
double quantile_initial_guess(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorKind::DomainError, "quantile probability " + std::to_string(p));
    double x = quantile_initial_guess(p);
    // Newton on Phi(x) - p, done in the tail that keeps the residual accurate.
    for (int k = 0; k < 2; ++k) {
        const double pdf = std_normal_pdf(x);
        if (pdf == 0.0) break;
        const double resid = x <= 0.0 ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
        x -= resid / pdf;
    }
    return x;
}

double truncated_lognormal_moment(double a, double d, double mean, double sd) {
    if (!(sd > 0.0)) throw Error(ErrorKind::DomainError, "sd must be positive");
    return std::exp(a * mean + 0.5 * a * a * sd * sd) * std_normal_cdf((d - mean) / sd - a * sd);
}

double h1_inverse_saturating(const StatePriceDistribution& dist, double q) {
    if (q <= 0.0) return 0.0;
    if (q >= dist.expected_z()) return kInf;
    return dist.h1_inverse(q);
}

LognormalStatePrice::LognormalStatePrice(double m0, double nu0)
    : m0_(m0), nu0_(nu0), expected_z_(std::exp(m0 + 0.5 * nu0 * nu0)) {
    if (!(nu0 >= 0.0) || !std::isfinite(m0))
        throw Error(ErrorKind::DomainError, "lognormal parameters");
}

double LognormalStatePrice::standardized(double y) const {
    if (y <= 0.0) return -kInf;
    if (y == kInf) return kInf;
    return (std::log(y) - m0_) / nu0_;
}

double LognormalStatePrice::h0(double y) const {
    if (y <= 0.0) return 0.0;
    if (degenerate()) return y >= expected_z_ ? 1.0 : 0.0;
    const double f1 = standardized(y);
    if (f1 < -kClampSd) return 0.0;
    if (f1 > kClampSd) return 1.0;
    return std_normal_cdf(f1);
}

double LognormalStatePrice::h1(double y) const {
    if (y <= 0.0) return 0.0;
    if (degenerate()) return y >= expected_z_ ? expected_z_ : 0.0;
    const double f1 = standardized(y);
    if (f1 < -kClampSd) return 0.0;
    if (f1 > kClampSd) return expected_z_;
    return expected_z_ * std_normal_cdf(f1 - nu0_);
}

double LognormalStatePrice::h1_inverse(double q) const {
    if (!(q > 0.0 && q < expected_z_))
        throw Error(ErrorKind::DomainError, "h1_inverse argument " + std::to_string(q) +
                                                " outside (0, " + std::to_string(expected_z_) + ")");
    if (degenerate()) throw Error(ErrorKind::DomainError, "h1_inverse of a point mass");
    return std::exp(m0_ + nu0_ * (std_normal_quantile(q / expected_z_) + nu0_));
}

}  // namespace dcvar
