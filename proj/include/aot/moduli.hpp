#pragma once

#include "aot/parallel.hpp"
#include "aot/path_measure.hpp"

#include <vector>

namespace aot {

/// Modulus of continuity at time t (1-based, 1 <= t <= T-1): the largest
/// mass-weighted kernel distance achievable by recoupling the prefix marginal
/// with itself under a ground-cost budget of delta^p. The budget constraint
/// is closed (<= delta^p); `budget_tight` reports whether it binds, which is
/// the only place the closed and open formulations can differ.
struct ModulusResult {
    double value = 0.0;
    bool budget_tight = false;
};

ModulusResult modulus_omega_full(const PathMeasure& mu, int t, double p, double delta,
                                 Execution ex = Execution::parallel);

double modulus_omega(const PathMeasure& mu, int t, double p, double delta,
                     Execution ex = Execution::parallel);

/// Same recoupling with gains taken between full-future conditional path
/// measures (Euclidean distance on R^{d(T-t)}).
double extended_modulus_omega_bar(const PathMeasure& mu, int t, double p, double delta,
                                  Execution ex = Execution::parallel);

/// g^{s,p}(delta) for s = t..T-1 via g^s = omega^s(delta + sum_{l<s} g^l);
/// their sum dominates the extended modulus.
std::vector<double> g_recursion(const PathMeasure& mu, int t, double p, double delta,
                                Execution ex = Execution::parallel);

/// h^0 = sigma, h^t = omega^t(sum_{s<t} h^s); returns h^{0..T-1}.
std::vector<double> h_iteration(const PathMeasure& mu, double p, double sigma,
                                Execution ex = Execution::parallel);

/// Smallest L with W_p(kernel_x, kernel_y) <= L |x - y|^alpha across all
/// prefix pairs and times.
double holder_constant(const PathMeasure& mu, double p, double alpha,
                       Execution ex = Execution::parallel);

struct ModulusCurve {
    int t = 1;
    double p = 1.0;
    std::vector<std::pair<double, double>> samples; // (delta, value)
};

ModulusCurve modulus_curve(const PathMeasure& mu, int t, double p,
                           const std::vector<double>& deltas,
                           Execution ex = Execution::parallel);

} // namespace aot
