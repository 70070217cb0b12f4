#pragma once

#include "aot/noise.hpp"
#include "aot/parallel.hpp"
#include "aot/path_measure.hpp"

#include <vector>

namespace aot {

struct SmoothScheme {
    double grid_step = 0.0;   // absolute lattice step; 0 = default sigma/20
    double radius_mult = 6.0; // per-coordinate truncation at radius_mult * sigma
    std::size_t cell_cap = 1000000;
    bool snap_pow2 = false; // snap the step to sigma * 2^k (required by smooth_aw)
};

/// Quantized convolution mu * xi_sigma with certified error budgets.
///
/// The grid is the absolute lattice step * Z^N, so the smoothed supports of
/// different measures (same sigma, same step) land on shared coordinates and
/// exact prefix grouping stays meaningful. Budgets charge the actual atom
/// snapping distance plus within-cell displacement, and truncated mass at
/// the worst-case displacement (radius_mult * sigma * sqrt(N))^p.
struct SmoothedApprox {
    PathMeasure approx;
    double sigma = 0.0;
    double p = 1.0;
    double grid_step = 0.0;
    double trunc_mass = 0.0;    // pre-renormalization truncated mass
    double quant_cost_w = 0.0;  // p-power quantization charge, Euclidean on R^{dT}
    double quant_cost_aw = 0.0; // p-power quantization charge, summed per stage
    double trunc_charge = 0.0;  // trunc_mass * (radius_mult * sigma * sqrt(N))^p
    /// One-sided: discrete TV cannot exceed the exact smoothed TV by more
    /// than this (truncated and renormalized mass plus snapping shift).
    double tv_budget = 0.0;
    /// Two-sided: |discrete TV - exact smoothed TV| bound; adds the
    /// within-cell variation the cell aggregation can hide.
    double tv_budget_abs = 0.0;

    double budget_w() const;  // W_p-valid bound on the distance to mu * xi_sigma
    double budget_aw() const; // AW_p-valid bound (snapping is an adapted map)
};

SmoothedApprox convolve_quantized(const PathMeasure& mu, const NoiseModel& noise,
                                  double sigma, double p, SmoothScheme scheme = {});

struct SmoothResult {
    double value = 0.0;
    double budget = 0.0; // the true smooth distance lies within value +- budget
};

/// W_p between the two quantized smoothed measures (shared lattice).
SmoothResult smooth_w(const PathMeasure& mu, const PathMeasure& nu, const NoiseModel& noise,
                      double p, double sigma, SmoothScheme scheme = {},
                      Execution ex = Execution::parallel);

/// AW_p between the two quantized smoothed measures. The lattice step is
/// snapped to sigma * 2^k so reconstructed coordinates compare exactly.
SmoothResult smooth_aw(const PathMeasure& mu, const PathMeasure& nu, const NoiseModel& noise,
                       double p, double sigma, SmoothScheme scheme = {},
                       Execution ex = Execution::parallel);

/// Certified upper bound on the tail of mu * xi_sigma outside radius R,
/// integrating (|x_i| + sigma s)^p over the radial noise law.
double smoothed_tail_upper(const PathMeasure& mu, const NoiseModel& noise, double sigma,
                           double p, double R);

/// Certified upper bound on M_q(mu * xi_sigma).
double smoothed_moment_upper(const PathMeasure& mu, const NoiseModel& noise, double sigma,
                             double q);

// ---- closed-form / quadrature oracles for the two-step standard pair ------

/// Equal-weight mixture of Gaussians with common scale; CDF and quantiles
/// for the 1-D distance oracles.
struct GaussianMixture1D {
    std::vector<double> means;
    std::vector<double> weights;
    double sigma = 1.0;

    double cdf(double x) const;
    double quantile(double u) const;
};

double mixture_wp(const GaussianMixture1D& f, const GaussianMixture1D& g, double p);

/// Smooth AW_p between the two-step pair mu = (delta_{(0,1)} + delta_{(0,-1)})/2
/// and mu_eps (first coordinate +-eps) under Gaussian noise, evaluated through
/// the first-coordinate decomposition with quadrature. d = 1, T = 2 only.
double standard_example_smooth_aw(double eps, double sigma, double p);

/// Modulus of continuity of mu_eps at time 1: min(delta/eps, 2).
double modulus_standard_example(double eps, double delta, double p);

} // namespace aot
