#pragma once

#include "sif/periodic_fn.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sif {

/// Stochastic integrate-and-fire oscillator
///   dX = (-gamma X + I(t)) dt + eps dW,   fire at X = g(t),   reset to h(t).
///
/// Immutable after construction; every query is a pure function of the value.
class SifModel {
public:
    /// Throws ConfigError when gamma < 0, eps < 0, or h(t) >= g(t) anywhere on a dense grid.
    SifModel(double gamma, double eps, PeriodicFn input, PeriodicFn threshold, PeriodicFn reset);

    double gamma() const noexcept { return gamma_; }
    double eps() const noexcept { return eps_; }
    const PeriodicFn& input() const noexcept { return input_; }
    const PeriodicFn& threshold() const noexcept { return threshold_; }
    const PeriodicFn& reset() const noexcept { return reset_; }

    SifModel with_eps(double eps) const;

    /// Noise-free solution xi(t | t0, x0).
    double flow(double t, double t0, double x0) const;
    /// Right-hand side -gamma x + I(t).
    double drift(double t, double x) const { return -gamma_ * x + input_(t); }
    /// Periodic attractor of the noise-free flow, xi-bar(t) (gamma > 0). For
    /// gamma = 0 this is the zero-mean oscillating part of the antiderivative of I.
    double steady_state(double t) const { return response_(t); }
    /// -gamma g(t) + I(t) - g'(t): slope of a trajectory leaving the threshold minus the threshold slope.
    double slope_margin(double t) const;
    /// sigma^2(t | t0) as a function of the elapsed time t - t0.
    double variance_factor(double elapsed) const;

private:
    double gamma_;
    double eps_;
    PeriodicFn input_;
    PeriodicFn threshold_;
    PeriodicFn reset_;
    PeriodicFn response_;
};

double eval_flow(const SifModel& model, double t, double t0, double x0);

struct ConditionA {
    bool holds = false;
    /// max_t (xi-bar(t) - g(t)) for gamma > 0, integral of I over a period for gamma = 0.
    double witness = 0.0;
};

struct ConditionB {
    bool holds = false;
    double min_margin = 0.0;
    double argmin = 0.0;
    /// I - gamma g0 - |k| sqrt(gamma^2 + 4 pi^2) when I is constant and g sinusoidal.
    std::optional<double> closed_form_margin;
    bool routes_agree = true;
};

struct ConditionReport {
    ConditionA condA;
    ConditionB condB;
    /// Provisional here (equals condB); detmap refines it from the discontinuity set.
    bool condBprime = false;
    /// Zeros of the slope margin, i.e. threshold times where a grazing contact is possible.
    std::vector<double> tangency_points;
    std::string notes;
};

ConditionA mean_threshold_gap(const SifModel& model);
ConditionB check_transversality(const SifModel& model);
ConditionReport check_conditions(const SifModel& model);

/// Equivalent constant-input model: X-hat = X - k(t) with k' = -gamma k + I(t) - target.
struct ReducedModel {
    SifModel model;
    /// The periodic shift k(t); x0 maps to x0 - shift(t0).
    PeriodicFn shift;
};

ReducedModel reduce_to_constant_input(const SifModel& model, double target);
/// Uses target = mean of the input.
ReducedModel reduce_to_constant_input(const SifModel& model);

} // namespace sif
