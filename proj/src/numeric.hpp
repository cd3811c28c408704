#pragma once

// Small scalar helpers shared by the library sources.

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

namespace sif::detail {

/// Short %g rendering for messages.
inline std::string short_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

inline double wrap_phase(double t) { return t - std::floor(t); }

/// Distance on the circle R/Z.
inline double circle_distance(double a, double b)
{
    const double d = wrap_phase(a - b);
    return std::min(d, 1.0 - d);
}

/// Golden-section search for the maximizer of a unimodal f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol = 1e-12)
{
    constexpr double r = 0.6180339887498949;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + r * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - r * (b - a); f1 = f(x1);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

/// Bisection for a sign change of f on [a, b] with f(a) < 0 <= f(b).
/// Returns the smallest bracket end with f >= 0.
template <class F>
double bisect_up(F&& f, double a, double b, double tol = 1e-14)
{
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        if (f(m) < 0.0) a = m; else b = m;
    }
    return b;
}

} // namespace sif::detail
