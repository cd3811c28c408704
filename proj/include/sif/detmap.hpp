#pragma once

#include "sif/model.hpp"

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sif {

/// First time t >= t0 with xi(t | t0, x0) = g(t), touching contacts included.
/// Throws NoCrossing past t0 + 50 periods.
double hit_time(const SifModel& model, double t0, double x0);
/// First time t > t0 with xi(t | t0, x0) > g(t); skips grazing contacts.
double crossing_time(const SifModel& model, double t0, double x0);
/// Same, starting from the reset value h(t0).
double crossing_time(const SifModel& model, double t0);

struct OrbitRecord {
    std::vector<double> phases; ///< theta_1..theta_kappa in [0,1), in orbit order
    int period = 0;
    long winding = 0;           ///< f^kappa(theta_1) = theta_1 + winding
    double multiplier = 0.0;    ///< product of f' along the orbit
    bool stable = false;
};

enum class DiscontinuityKind {
    continuous_tangency, ///< f* = f; continuous but not differentiable
    jump                 ///< f* > f; trajectory grazes then crosses later
};

struct DiscontinuityRecord {
    double phase = 0.0;
    double f_at = 0.0;      ///< lift f(t0): the grazing contact time
    double f_star_at = 0.0; ///< lift f*(t0): the first strict crossing
    DiscontinuityKind kind = DiscontinuityKind::jump;
    bool gap_verified = false; ///< g > xi observed on a sampled grid of (f, f*)
};

/// The deterministic firing map f (as a lift on R) of one model, with a
/// sampled copy on a uniform phase grid for cheap iteration and inversion.
class FiringMap {
public:
    explicit FiringMap(const SifModel& model, int grid = 4096);

    const SifModel& model() const noexcept { return model_; }

    double lift(double t0) const;
    double crossing(double t0) const;
    /// f-tilde(theta) in [0,1).
    double phase_map(double theta) const;
    double iterate_lift(double t0, int n) const;
    /// f'(t0) via implicit differentiation; throws AtDiscontinuity near D.
    double derivative(double t0) const;

    /// Piecewise-linear interpolant of the lift, split at discontinuities.
    double approx_lift(double t0) const;
    /// Preimage of y under the interpolant when the lift is nondecreasing.
    std::optional<double> approx_inverse(double y) const;
    /// All theta in [0,1) with f-tilde(theta) = y mod 1.
    std::vector<double> preimages(double y) const;

    const std::vector<DiscontinuityRecord>& discontinuities() const noexcept { return discontinuities_; }
    bool nondecreasing() const noexcept { return nondecreasing_; }
    int grid() const noexcept { return grid_; }
    double distance_to_discontinuity(double theta) const;

private:
    struct Piece {
        double a, b;   // phase interval
        double fa, fb; // lift values at the ends (one-sided at discontinuities)
    };
    void detect_discontinuities();
    void detect_tangencies();
    void build_pieces();
    const Piece& piece_at(double u) const;

    SifModel model_;
    int grid_;
    std::vector<double> lift_samples_; // f(i / grid), i = 0..grid-1
    std::vector<DiscontinuityRecord> discontinuities_;
    std::vector<Piece> pieces_;
    std::vector<double> piece_starts_;
    bool nondecreasing_ = true;
};

double map_derivative(const SifModel& model, double t0, std::span<const DiscontinuityRecord> known_discontinuities = {});
std::vector<OrbitRecord> find_orbits(const SifModel& model, int max_period);
std::vector<OrbitRecord> find_orbits(const FiringMap& map, int max_period);
std::vector<DiscontinuityRecord> find_discontinuities(const SifModel& model);

struct DConditions {
    bool d1 = false;
    bool d2 = false;
    bool d3 = false;
    std::optional<int> ell;                      ///< smallest l with f^{-l}(D) empty, if found up to the cap
    std::vector<std::vector<double>> preimages;  ///< f^{-i}(D), i = 1..
    int attracting_orbit = -1;                   ///< index of P in the report's orbit list
    std::string diagnostics;
};

struct ReturnMapReport {
    ConditionReport conditions;
    std::vector<OrbitRecord> orbits;
    std::vector<DiscontinuityRecord> discontinuities;
    std::vector<double> image_set; ///< E = f(D) u f*(D), as phases
    DConditions d;
    /// Continuous-map hypotheses: A, B, empty D, one stable orbit attracting every seed.
    bool continuous_theory_applies = false;
};

DConditions check_D_conditions(const ReturnMapReport& report, const FiringMap& map, int ell_cap = 8);
DConditions check_D_conditions(const ReturnMapReport& report, const SifModel& model, int ell_cap = 8);

ReturnMapReport analyze_map(const FiringMap& map, int max_period = 8, int ell_cap = 8);
ReturnMapReport analyze_map(const SifModel& model, int max_period = 8, int ell_cap = 8);

struct SpectrumGenerator {
    int orbit = 0;
    int power = 0;
    int root = 0;
    bool unstable = false;
};

struct LimitEntry {
    std::complex<double> value;
    SpectrumGenerator generator;
};

struct LimitSpectrum {
    std::vector<LimitEntry> entries; ///< modulus non-increasing
    double cutoff = 0.0;
    std::string basis;               ///< "continuous" or "discontinuous"
};

/// Limiting eigenvalues of the phase transition operator as eps -> 0, down to modulus r_min.
/// Throws PredictionInvalid unless one of the two sets of hypotheses is verified.
LimitSpectrum predict_spectrum(const ReturnMapReport& report, double r_min);

} // namespace sif
