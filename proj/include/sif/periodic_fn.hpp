#pragma once

#include <cstddef>
#include <vector>

namespace sif {

/// Coefficients of one harmonic: c*cos(2*pi*k*t) + s*sin(2*pi*k*t).
struct Harmonic {
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;

    friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// A period-1 function drawn from a small parametric family.
///
/// Every variant is stored canonically as a truncated Fourier series
///   a0 + sum_k (c_k cos 2 pi k t + s_k sin 2 pi k t),
/// which is what the closed-form flow and the input reduction work with.
/// The original variant is kept so serialization round-trips.
class PeriodicFn {
public:
    enum class Kind { constant, sinusoid, fourier };

    static constexpr std::size_t max_harmonics = 64;

    PeriodicFn() = default;

    static PeriodicFn constant(double value);
    /// offset + amplitude * sin(2 pi t + phase)
    static PeriodicFn sinusoid(double offset, double amplitude, double phase = 0.0);
    static PeriodicFn fourier(double a0, std::vector<Harmonic> harmonics);

    Kind kind() const noexcept { return kind_; }
    bool is_constant() const noexcept;

    double operator()(double t) const { return eval(t); }
    double eval(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;

    double mean() const noexcept { return a0_; }
    const std::vector<Harmonic>& harmonics() const noexcept { return harmonics_; }

    // Sinusoid parameters (meaningful only for Kind::sinusoid).
    double offset() const noexcept { return offset_; }
    double amplitude() const noexcept { return amplitude_; }
    double phase() const noexcept { return phase_; }

    /// Pointwise difference, simplified to the narrowest variant that represents it.
    friend PeriodicFn operator-(const PeriodicFn& a, const PeriodicFn& b);
    friend PeriodicFn operator+(const PeriodicFn& a, const PeriodicFn& b);

    friend bool operator==(const PeriodicFn&, const PeriodicFn&) = default;

private:
    static PeriodicFn simplified(double a0, std::vector<Harmonic> harmonics);
    double series(double t, int order) const;

    Kind kind_ = Kind::constant;
    double a0_ = 0.0;
    std::vector<Harmonic> harmonics_;
    double offset_ = 0.0;
    double amplitude_ = 0.0;
    double phase_ = 0.0;
};

} // namespace sif
