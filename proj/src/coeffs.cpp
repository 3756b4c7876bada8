#include "mmf/coeffs.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace mmf {

namespace {

// Adaptive Simpson on [a,b]; integrands here are smooth but can be sharply
// peaked (width ~ 1/lambda or ~ lambda), hence the generous depth cap.
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Second condition stops refinement once delta is at the roundoff level of
    // the partial sums; without it, sharply peaked integrands recurse to full
    // depth over the whole peak.
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol ||
        std::fabs(delta) <= 1e-14 * (std::fabs(left) + std::fabs(right)))
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Relative tolerance: the integrals here can span many orders of
    // magnitude in lambda.
    const double tol = rel_tol * std::max(std::fabs(whole), 1e-300);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

// g(theta) = cos^2 + lambda^2 sin^2; all integrands are symmetric in both
// axes, so [0, pi/2] suffices and the common factor cancels in the quotients.
double quotient(double lambda, double num_pow_s, double num_pow_c, double den_pow_s,
                double den_pow_c, double g_exp) {
    auto make = [&](double ps, double pc) {
        return [=](double th) {
            const double c = std::cos(th), s = std::sin(th);
            const double g = c * c + lambda * lambda * s * s;
            double v = std::pow(g, g_exp);
            if (ps != 0.0) v *= std::pow(s * s, 0.5 * ps);
            if (pc != 0.0) v *= std::pow(c * c, 0.5 * pc);
            return v;
        };
    };
    const double tol = 1e-12;
    // Split at the crossover angle tan(theta) = 1/lambda so the adaptive
    // refinement starts with a node at the integrand's sharp feature.
    const double split = std::atan(1.0 / lambda);
    auto both = [&](double ps, double pc) {
        return integrate(make(ps, pc), 0.0, split, tol) +
               integrate(make(ps, pc), split, M_PI / 2.0, tol);
    };
    return both(num_pow_s, num_pow_c) / both(den_pow_s, den_pow_c);
}

}  // namespace

double q1(double lambda) {
    if (lambda == 0.0) return 1.0;
    if (std::isinf(lambda)) return 0.0;
    return quotient(lambda, 2.0, 2.0, 0.0, 2.0, -1.5);
}

double q2(double lambda) {
    if (lambda == 0.0) return 1.0;
    if (std::isinf(lambda)) return 0.0;
    return quotient(lambda, 4.0, 0.0, 2.0, 0.0, -1.5);
}

double q3(double lambda) {
    if (lambda == 0.0) return 1.0;
    if (std::isinf(lambda)) return 0.0;
    return quotient(lambda, 2.0, 0.0, 0.0, 0.0, -0.5);
}

}  // namespace mmf
