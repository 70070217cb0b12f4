#include "aot/noise.hpp"

#include "aot/errors.hpp"
#include "aot/quadrature.hpp"

#include <cmath>
#include <limits>

namespace aot {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;
constexpr double kInvSqrt2Pi = 0.39894228040143268;

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t * kInvSqrt2); }

// 1-D bump profile g(s) = (15/16)(1-s^2)^2 on [-1, 1]
double bump_pdf1(double s) {
    if (std::fabs(s) >= 1.0) return 0.0;
    double u = 1.0 - s * s;
    return 0.9375 * u * u;
}

double bump_cdf1(double s) {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return 0.9375 * (s - 2.0 * s * s * s / 3.0 + std::pow(s, 5) / 5.0) + 0.5;
}

// E|S|^p of the 1-D profile: (15/8) (1/(p+1) - 2/(p+3) + 1/(p+5))
double bump_abs_moment1(double p) {
    return 1.875 * (1.0 / (p + 1.0) - 2.0 / (p + 3.0) + 1.0 / (p + 5.0));
}

} // namespace

NoiseModel NoiseModel::gaussian(int dim) {
    if (dim < 1) throw ValidationError("invalid-measure: noise dimension must be positive");
    return NoiseModel(NoiseKind::gaussian, dim);
}

NoiseModel NoiseModel::uniform_ball(int dim) {
    if (dim < 1) throw ValidationError("invalid-measure: noise dimension must be positive");
    return NoiseModel(NoiseKind::uniform_ball, dim);
}

double NoiseModel::support_radius() const {
    return compact() ? 1.0 : std::numeric_limits<double>::infinity();
}

double NoiseModel::support_diameter() const { return compact() ? 2.0 : support_radius(); }

double NoiseModel::moment_p(double p) const {
    if (kind_ == NoiseKind::gaussian) {
        // chi distribution: E S^p = 2^{p/2} Gamma((N+p)/2) / Gamma(N/2)
        return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (dim_ + p)) -
                        std::lgamma(0.5 * dim_));
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    if (dim_ == 1) return bump_abs_moment1(p) * std::pow(scale, p);
    if (p == 2.0) return 1.0 / 7.0; // N * E Z_1^2 = N * (1/7N)
    double second = 1.0 / 7.0;
    double bound;
    if (p < 2.0)
        bound = std::pow(second, 0.5 * p); // Jensen
    else
        bound = std::pow(static_cast<double>(dim_), 0.5 * p) * bump_abs_moment1(p) *
                std::pow(scale, p);
    return std::min(1.0, bound); // support is inside the unit ball
}

double NoiseModel::grad_l1() const {
    if (kind_ == NoiseKind::gaussian) return gaussian_grad_l1(dim_);
    // per coordinate ||g'||_1 = 2 g(0); summing coordinates bounds |grad f|
    const double g0 = 0.9375 * std::sqrt(static_cast<double>(dim_));
    return dim_ == 1 ? 2.0 * g0 : dim_ * 2.0 * g0;
}

double NoiseModel::coord_cdf(double t) const {
    if (kind_ == NoiseKind::gaussian) return std_normal_cdf(t);
    return bump_cdf1(t * std::sqrt(static_cast<double>(dim_)));
}

double NoiseModel::coord_pdf(double t) const {
    if (kind_ == NoiseKind::gaussian) return kInvSqrt2Pi * std::exp(-0.5 * t * t);
    double r = std::sqrt(static_cast<double>(dim_));
    return r * bump_pdf1(t * r);
}

double NoiseModel::radial_tail_moment(double p, double s0) const {
    if (s0 < 0.0) s0 = 0.0;
    if (kind_ == NoiseKind::uniform_ball) {
        if (s0 >= 1.0) return 0.0;
        return std::min(1.0, moment_p(p)); // |S| <= 1
    }
    const int N = dim_;
    auto integrand = [&](double s) { return std::pow(s, p) * gaussian_radial_pdf(N, s); };
    const double hi = std::max(s0, std::sqrt(static_cast<double>(N))) + 42.0;
    auto q = integrate_panels(integrand, s0, hi, 24, 1e-13, 1e-11);
    return q.value;
}

double gaussian_radial_pdf(int dim, double s) {
    if (s <= 0.0) return 0.0;
    double lp = (1.0 - 0.5 * dim) * std::log(2.0) - std::lgamma(0.5 * dim) +
                (dim - 1.0) * std::log(s) - 0.5 * s * s;
    return lp < -700.0 ? 0.0 : std::exp(lp);
}

double gaussian_grad_l1(int dim) {
    return std::sqrt(2.0) *
           std::exp(std::lgamma(0.5 * (dim + 1)) - std::lgamma(0.5 * dim));
}

} // namespace aot
