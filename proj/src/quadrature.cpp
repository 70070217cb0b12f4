#include "aot/quadrature.hpp"

#include <cmath>

namespace aot {

namespace {

struct Ctx {
    const std::function<double(double)>& f;
    double abs_tol;
    double rel_tol;
    long evals = 0;
    double residual = 0.0;
    bool converged = true;
};

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(Ctx& c, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = c.f(lm), frm = c.f(rm);
    c.evals += 2;
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol || depth <= 0) {
        if (depth <= 0 && std::fabs(delta) > 15.0 * tol) {
            c.residual += std::fabs(delta) / 15.0;
            c.converged = false;
        } else {
            c.residual += std::fabs(delta) / 15.0;
        }
        return left + right + delta / 15.0;
    }
    return recurse(c, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(c, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, int max_depth) {
    QuadResult out;
    if (!(b > a)) return out;
    Ctx c{f, abs_tol, rel_tol};
    double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    c.evals = 3;
    double whole = simpson(fa, fm, fb, b - a);
    double tol = abs_tol + rel_tol * std::fabs(whole);
    out.value = recurse(c, a, b, fa, fm, fb, whole, tol, max_depth);
    out.residual = c.residual;
    out.evals = c.evals;
    out.converged = c.converged;
    return out;
}

QuadResult integrate_panels(const std::function<double(double)>& f, double a, double b,
                            int panels, double abs_tol, double rel_tol, int max_depth) {
    QuadResult out;
    if (!(b > a) || panels < 1) return out;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        QuadResult part = integrate(f, a + k * h, a + (k + 1) * h, abs_tol / panels, rel_tol,
                                    max_depth);
        out.value += part.value;
        out.residual += part.residual;
        out.evals += part.evals;
        out.converged = out.converged && part.converged;
    }
    return out;
}

} // namespace aot
