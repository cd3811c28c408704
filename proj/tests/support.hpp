#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace sif::test {

/// Composite Simpson rule with `panels` (rounded up to even) subintervals.
template <class F>
double simpson(F f, double a, double b, int panels)
{
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double circle_distance(double a, double b)
{
    const double d = std::abs(a - b) - std::floor(std::abs(a - b));
    return std::min(d, 1.0 - d);
}

inline double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace sif::test
