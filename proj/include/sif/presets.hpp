#pragma once

#include "sif/model.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace sif {

struct ExpectedOrbit {
    int period = 1;
    bool stable = true;
    /// As printed; phases_checked differs only where the printed value is a typo.
    std::vector<double> phases;
    std::vector<double> phases_checked;
    double multiplier = 0.0;
    /// A second printed value for the same multiplier, when the source disagrees with itself.
    std::optional<double> multiplier_alt;
};

struct ExpectedDiscontinuity {
    double phase = 0.0;
    double f_tilde = 0.0;
    double f_star_tilde = 0.0;
};

/// One of the leaky examples: gamma = 1/12.8, I constant, g = 1 + k sin 2 pi t, h = 0.
struct ExamplePreset {
    int id = 0;
    double input = 0.0;
    double k = 0.0;
    bool condB = false;
    std::vector<ExpectedOrbit> orbits;
    std::vector<ExpectedDiscontinuity> discontinuities;
    std::vector<double> first_preimages; ///< f^{-1}(D) when printed
    std::optional<int> ell;
    /// Predicted spectrum head, modulus descending; conjugates and sign pairs listed.
    std::vector<std::complex<double>> limit_head;
    double tolerance = 1e-3;

    SifModel model(double eps = 0.05) const;
};

inline constexpr double example_gamma = 1.0 / 12.8;
inline constexpr double example_eps = 0.05;

/// Examples 1 to 6; throws ConfigError otherwise.
const ExamplePreset& example_preset(int id);
const std::vector<ExamplePreset>& example_presets();

/// gamma = 1, I = 2, g = 1, h = 0, eps = 0.1; started from x0 = 0.5 at t0 = 0.
SifModel ou_model(double eps = 0.1);
inline constexpr double ou_x0 = 0.5;
/// gamma = 1, I = 1.4, g = 1 + 0.3 sin 2 pi t, h = 0: a grazing jump case.
SifModel grazing_model(double eps = 0.05);

} // namespace sif

#include "sif/detmap.hpp"

namespace sif {

struct PresetCheck {
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Compares a map analysis (and optionally its predicted spectrum) with the
/// preset's reference values.
std::vector<PresetCheck> check_preset(const ExamplePreset& preset, const ReturnMapReport& report,
                                      const LimitSpectrum* predicted = nullptr);

} // namespace sif
