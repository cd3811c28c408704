#include "sif/periodic_fn.hpp"

#include "sif/error.hpp"

#include <cmath>
#include <numbers>

namespace sif {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Exact in floating point for |t| < 2^52, so eval(t + 1) == eval(t) up to the
// rounding of t + 1 itself.
double frac(double t) { return t - std::floor(t); }

} // namespace

PeriodicFn PeriodicFn::constant(double value)
{
    PeriodicFn f;
    f.kind_ = Kind::constant;
    f.a0_ = value;
    f.offset_ = value;
    return f;
}

PeriodicFn PeriodicFn::sinusoid(double offset, double amplitude, double phase)
{
    PeriodicFn f;
    f.kind_ = Kind::sinusoid;
    f.a0_ = offset;
    f.offset_ = offset;
    f.amplitude_ = amplitude;
    f.phase_ = phase;
    f.harmonics_ = {Harmonic{amplitude * std::sin(phase), amplitude * std::cos(phase)}};
    return f;
}

PeriodicFn PeriodicFn::fourier(double a0, std::vector<Harmonic> harmonics)
{
    if (harmonics.size() > max_harmonics)
        throw ConfigError("fourier series has " + std::to_string(harmonics.size()) +
                          " harmonics; at most 64 are supported");
    for (const auto& h : harmonics)
        if (!std::isfinite(h.cos_coeff) || !std::isfinite(h.sin_coeff))
            throw ConfigError("fourier coefficients must be finite");
    PeriodicFn f;
    f.kind_ = Kind::fourier;
    f.a0_ = a0;
    f.harmonics_ = std::move(harmonics);
    return f;
}

bool PeriodicFn::is_constant() const noexcept
{
    for (const auto& h : harmonics_)
        if (h.cos_coeff != 0.0 || h.sin_coeff != 0.0) return false;
    return true;
}

double PeriodicFn::series(double t, int order) const
{
    const double x = frac(t);
    if (kind_ == Kind::sinusoid) {
        const double arg = two_pi * x + phase_;
        switch (order) {
        case 0: return offset_ + amplitude_ * std::sin(arg);
        case 1: return two_pi * amplitude_ * std::cos(arg);
        default: return -two_pi * two_pi * amplitude_ * std::sin(arg);
        }
    }
    double sum = order == 0 ? a0_ : 0.0;
    if (harmonics_.empty()) return sum;
    const double c1 = std::cos(two_pi * x);
    const double s1 = std::sin(two_pi * x);
    double ck = c1, sk = s1;
    for (std::size_t k = 1; k <= harmonics_.size(); ++k) {
        const auto& h = harmonics_[k - 1];
        const double w = two_pi * static_cast<double>(k);
        switch (order) {
        case 0: sum += h.cos_coeff * ck + h.sin_coeff * sk; break;
        case 1: sum += w * (h.sin_coeff * ck - h.cos_coeff * sk); break;
        default: sum -= w * w * (h.cos_coeff * ck + h.sin_coeff * sk); break;
        }
        const double cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
    }
    return sum;
}

double PeriodicFn::eval(double t) const { return series(t, 0); }
double PeriodicFn::derivative(double t) const { return series(t, 1); }
double PeriodicFn::second_derivative(double t) const { return series(t, 2); }

PeriodicFn PeriodicFn::simplified(double a0, std::vector<Harmonic> harmonics)
{
    while (!harmonics.empty() && harmonics.back().cos_coeff == 0.0 && harmonics.back().sin_coeff == 0.0)
        harmonics.pop_back();
    if (harmonics.empty()) return constant(a0);
    return fourier(a0, std::move(harmonics));
}

namespace {

std::vector<Harmonic> combine(const std::vector<Harmonic>& a, const std::vector<Harmonic>& b, double sign)
{
    std::vector<Harmonic> out(std::max(a.size(), b.size()));
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (k < a.size()) out[k] = a[k];
        if (k < b.size()) {
            out[k].cos_coeff += sign * b[k].cos_coeff;
            out[k].sin_coeff += sign * b[k].sin_coeff;
        }
    }
    return out;
}

} // namespace

PeriodicFn operator-(const PeriodicFn& a, const PeriodicFn& b)
{
    if (b.is_constant() && a.kind() == PeriodicFn::Kind::sinusoid)
        return PeriodicFn::sinusoid(a.offset() - b.mean(), a.amplitude(), a.phase());
    if (b.is_constant() && a.kind() == PeriodicFn::Kind::constant)
        return PeriodicFn::constant(a.mean() - b.mean());
    return PeriodicFn::simplified(a.mean() - b.mean(), combine(a.harmonics(), b.harmonics(), -1.0));
}

PeriodicFn operator+(const PeriodicFn& a, const PeriodicFn& b)
{
    if (b.is_constant() && a.kind() == PeriodicFn::Kind::sinusoid)
        return PeriodicFn::sinusoid(a.offset() + b.mean(), a.amplitude(), a.phase());
    if (b.is_constant() && a.kind() == PeriodicFn::Kind::constant)
        return PeriodicFn::constant(a.mean() + b.mean());
    return PeriodicFn::simplified(a.mean() + b.mean(), combine(a.harmonics(), b.harmonics(), 1.0));
}

} // namespace sif
