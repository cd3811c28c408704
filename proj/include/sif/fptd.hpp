#pragma once

#include "sif/model.hpp"

#include <optional>
#include <vector>

namespace sif {

/// Small-noise Gaussian law of the passage time, N(f, (eps sigma_tau)^2).
struct GaussianFptd {
    double mean = 0.0;      ///< f(t0, x0)
    double stdev = 0.0;     ///< eps * sigma_tau
    double sigma_tau = 0.0; ///< sigma(f | t0) / m
    double slope_gap = 0.0; ///< m(t0, x0)
    double variance = 0.0;  ///< sigma^2(f | t0), spatial
    /// p_tau(u): N(0, sigma_tau^2) density, the eps-free limit of eps p(f + eps u).
    double scaled_density(double u) const;
    /// N(mean, stdev^2) density; requires stdev > 0.
    double density(double t) const;
};

/// Throws NonTransversal when the slope gap at the crossing is <= 1e-10.
GaussianFptd gaussian_approx(const SifModel& model, double t0, double x0);

/// Density of X_t at g(t) given X_{t0} = x0.
double transition_density_q(const SifModel& model, double t, double t0, double x0);
/// Slope term b1(t | t0, x0); needs constant input. Throws DegenerateInterval when t - t0 < 1e-14.
double slope_b1(const SifModel& model, double t, double t0, double x0);
/// b1(t | r, g(r)) in the cancellation-free expanded form; vanishes like t - r on the diagonal.
double boundary_kernel_b1(const SifModel& model, double t, double r);

/// Passage density of Brownian motion with drift I across the constant level B.
double closed_form_bm(double B, double I, double t0, double x0, double eps, double t);

/// A first-passage density on the uniform grid t_i = t0 + i * step.
struct FptdGrid {
    double t0 = 0.0;
    double x0 = 0.0;
    double step = 0.0;
    double horizon = 0.0;
    std::vector<double> density;
    std::vector<double> cumulative;
    double mass_deficit = 1.0;
    double clamped_mass = 0.0;
    long clamped_count = 0;

    double time(std::size_t i) const { return t0 + static_cast<double>(i) * step; }
    /// Piecewise-linear density reconstruction.
    double density_at(double t) const;
    /// Exact integral of the piecewise-linear reconstruction from t0 to t.
    double cumulative_at(double t) const;
};

struct VolterraOptions {
    /// default: eps sigma_tau / 20 clamped to [1e-5, 1e-3], halved while negative
    /// density mass exceeds clamp_abort
    std::optional<double> step;
    double mass_tolerance = 1e-6;
    int max_periods = 50;
    double failure_deficit = 1e-3;
    double clamp_abort = 1e-8;
    /// Extend the horizon to at least t0 + min_horizon even if mass is exhausted earlier.
    double min_horizon = 0.0;
};

double default_step(const SifModel& model, double t0, double x0);

/// p(t) = b1(t|t0,x0) q(t|t0,x0) - int_{t0}^{t} b1(t|r,g(r)) q(t|r,g(r)) p(r) dr,
/// marched forward on a uniform grid after reducing the input to a constant.
FptdGrid solve_volterra(const SifModel& model, double t0, double x0, const VolterraOptions& options = {});

/// Probability mass of the wrapped density in each of `cells` equal cells of [0, 1).
std::vector<double> wrap_cell_masses(const FptdGrid& grid, int cells);
/// Cell-averaged wrapped circle density; integrates to the grid's final cumulative mass.
std::vector<double> wrap_density(const FptdGrid& grid, int cells);

} // namespace sif
