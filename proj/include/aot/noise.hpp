#pragma once

namespace aot {

enum class NoiseKind { gaussian, uniform_ball };

/// Smoothing noise xi at unit scale on R^N. Both kinds have a C^1 density
/// with integrable gradient whose Fourier transform vanishes only on a null
/// set, and both factor per coordinate so convolution discretizes as a
/// product quadrature.
///
/// `gaussian` is N(0, Id_N). `uniform_ball` is a polynomial bump supported
/// inside the unit ball: the product of one-dimensional C^1 profiles
/// (15/16)(1 - t^2)^2 rescaled to [-1/sqrt(N), 1/sqrt(N)]. A raw uniform
/// indicator is not continuously differentiable, so this mollified profile
/// stands in for it.
class NoiseModel {
public:
    static NoiseModel gaussian(int dim);
    static NoiseModel uniform_ball(int dim);

    NoiseKind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool compact() const { return kind_ == NoiseKind::uniform_ball; }
    /// Radius of the support ball (infinity for gaussian).
    double support_radius() const;
    /// Diameter of the support (infinity for gaussian).
    double support_diameter() const;

    /// M_p(xi) = E|Z|^p. Exact for gaussian and for the bump when N == 1 or
    /// p == 2; otherwise a certified upper bound (the harness only ever uses
    /// it on the large side of an inequality).
    double moment_p(double p) const;

    /// ||grad f||_{L^1} of the unit-scale density. Exact for gaussian and
    /// the 1-D bump; coordinate-splitting upper bound for the bump in
    /// higher dimension.
    double grad_l1() const;

    /// CDF of a single coordinate factor at unit scale.
    double coord_cdf(double t) const;
    /// Density of a single coordinate factor at unit scale.
    double coord_pdf(double t) const;

    /// E[S^p 1{S >= s0}] for S = |Z|. Exact quadrature for gaussian
    /// (chi distribution); support-based upper bound for the bump.
    double radial_tail_moment(double p, double s0) const;

private:
    NoiseModel(NoiseKind k, int dim) : kind_(k), dim_(dim) {}
    NoiseKind kind_;
    int dim_;
};

/// sqrt(2) Gamma((N+1)/2) / Gamma(N/2): E|Z| for a standard Gaussian on R^N,
/// which equals the L^1 norm of its density gradient.
double gaussian_grad_l1(int dim);

/// Density of |Z| for Z ~ N(0, Id_N) (the chi distribution).
double gaussian_radial_pdf(int dim, double s);

} // namespace aot
