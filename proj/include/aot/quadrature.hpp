#pragma once

#include <functional>

namespace aot {

struct QuadResult {
    double value = 0.0;
    double residual = 0.0; // estimated absolute error
    long evals = 0;
    bool converged = true;
};

/// Adaptive Simpson on [a, b]. Converges when the local Richardson estimate
/// drops below max(abs_tol, rel_tol * |integral so far|) spread over the
/// subinterval; otherwise reports the accumulated residual.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-11, double rel_tol = 1e-10,
                     int max_depth = 48);

/// Adaptive Simpson over `panels` equal segments. Use for integrands whose
/// support is narrow relative to the interval: a single whole-interval
/// estimate can sample only the flat tails and stop early.
QuadResult integrate_panels(const std::function<double(double)>& f, double a, double b,
                            int panels, double abs_tol = 1e-11, double rel_tol = 1e-10,
                            int max_depth = 44);

} // namespace aot
