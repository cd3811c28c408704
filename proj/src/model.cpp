#include "sif/model.hpp"

#include "numeric.hpp"
#include "sif/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sif {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int condition_grid = 1001;

// Periodic particular solution of y' = -gamma y + I(t), dropping the mean term
// when gamma == 0 (it grows linearly there).
PeriodicFn periodic_response(double gamma, const PeriodicFn& input)
{
    std::vector<Harmonic> out;
    out.reserve(input.harmonics().size());
    for (std::size_t k = 0; k < input.harmonics().size(); ++k) {
        const double w = two_pi * static_cast<double>(k + 1);
        const double c = input.harmonics()[k].cos_coeff;
        const double s = input.harmonics()[k].sin_coeff;
        const double d = gamma * gamma + w * w;
        out.push_back({(gamma * c - w * s) / d, (w * c + gamma * s) / d});
    }
    const double a0 = gamma > 0.0 ? input.mean() / gamma : 0.0;
    if (out.empty()) return PeriodicFn::constant(a0);
    return PeriodicFn::fourier(a0, std::move(out));
}

} // namespace

SifModel::SifModel(double gamma, double eps, PeriodicFn input, PeriodicFn threshold, PeriodicFn reset)
    : gamma_(gamma), eps_(eps), input_(std::move(input)), threshold_(std::move(threshold)),
      reset_(std::move(reset))
{
    if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) throw ConfigError("gamma must be finite and >= 0");
    if (!(eps_ >= 0.0) || !std::isfinite(eps_)) throw ConfigError("eps must be finite and >= 0");
    constexpr int grid = 4096;
    for (int i = 0; i < grid; ++i) {
        const double t = static_cast<double>(i) / grid;
        if (!(reset_(t) < threshold_(t)))
            throw ConfigError("reset must lie strictly below threshold; violated at t=" + std::to_string(t));
    }
    response_ = periodic_response(gamma_, input_);
}

SifModel SifModel::with_eps(double eps) const
{
    SifModel m = *this;
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be finite and >= 0");
    m.eps_ = eps;
    return m;
}

double SifModel::flow(double t, double t0, double x0) const
{
    if (gamma_ > 0.0) {
        const double p0 = response_(t0);
        return response_(t) + std::exp(-gamma_ * (t - t0)) * (x0 - p0);
    }
    return x0 + input_.mean() * (t - t0) + response_(t) - response_(t0);
}

double SifModel::slope_margin(double t) const
{
    return -gamma_ * threshold_(t) + input_(t) - threshold_.derivative(t);
}

double SifModel::variance_factor(double elapsed) const
{
    if (gamma_ > 0.0) return -std::expm1(-2.0 * gamma_ * elapsed) / (2.0 * gamma_);
    return elapsed;
}

double eval_flow(const SifModel& model, double t, double t0, double x0) { return model.flow(t, t0, x0); }

ConditionA mean_threshold_gap(const SifModel& model)
{
    ConditionA out;
    if (model.gamma() == 0.0) {
        out.witness = model.input().mean();
        out.holds = out.witness > 0.0;
        return out;
    }
    auto gap = [&](double t) { return model.steady_state(t) - model.threshold()(t); };
    int best = 0;
    double best_val = gap(0.0);
    for (int i = 1; i < condition_grid; ++i) {
        const double v = gap(static_cast<double>(i) / (condition_grid - 1));
        if (v > best_val) { best_val = v; best = i; }
    }
    const double h = 1.0 / (condition_grid - 1);
    const double c = best * h;
    const auto [x, fx] = detail::golden_max(gap, c - h, c + h);
    out.witness = std::max(best_val, fx);
    out.holds = out.witness > 0.0;
    return out;
}

ConditionB check_transversality(const SifModel& model)
{
    ConditionB out;
    auto neg_margin = [&](double t) { return -model.slope_margin(t); };
    int best = 0;
    double best_val = neg_margin(0.0);
    for (int i = 1; i < condition_grid; ++i) {
        const double v = neg_margin(static_cast<double>(i) / (condition_grid - 1));
        if (v > best_val) { best_val = v; best = i; }
    }
    const double h = 1.0 / (condition_grid - 1);
    const double c = best * h;
    auto [x, fx] = detail::golden_max(neg_margin, c - h, c + h);
    if (fx < best_val) { fx = best_val; x = c; }
    out.min_margin = -fx;
    out.argmin = detail::wrap_phase(x);
    out.holds = out.min_margin > 0.0;

    const auto& g = model.threshold();
    const bool sinusoidal_threshold = g.kind() == PeriodicFn::Kind::sinusoid || g.kind() == PeriodicFn::Kind::constant;
    if (model.input().is_constant() && sinusoidal_threshold) {
        const double gam = model.gamma();
        const double k = std::abs(g.amplitude());
        const double closed = model.input().mean() - gam * g.mean() - k * std::sqrt(gam * gam + two_pi * two_pi);
        out.closed_form_margin = closed;
        out.routes_agree = std::abs(closed - out.min_margin) <= 1e-9 * (1.0 + std::abs(closed));
    }
    return out;
}

ConditionReport check_conditions(const SifModel& model)
{
    ConditionReport r;
    r.condA = mean_threshold_gap(model);
    r.condB = check_transversality(model);
    r.condBprime = r.condB.holds;

    if (!r.condB.holds) {
        // Zeros of the slope margin bound the threshold arcs that can be met tangentially.
        constexpr int grid = 4096;
        auto m = [&](double t) { return model.slope_margin(t); };
        double prev = m(0.0);
        for (int i = 1; i <= grid; ++i) {
            const double t1 = static_cast<double>(i) / grid;
            const double cur = m(t1);
            if ((prev < 0.0) != (cur < 0.0)) {
                const double t0 = static_cast<double>(i - 1) / grid;
                const double root = prev < 0.0 ? detail::bisect_up(m, t0, t1)
                                               : detail::bisect_up([&](double t) { return -m(t); }, t0, t1);
                r.tangency_points.push_back(detail::wrap_phase(root));
            }
            prev = cur;
        }
        r.notes = "transversality fails; grazing contacts possible on arcs bounded by tangency_points";
    }
    if (!r.condA.holds) r.notes += (r.notes.empty() ? "" : "; ") + std::string("condition A fails: firing not guaranteed");
    return r;
}

ReducedModel reduce_to_constant_input(const SifModel& model, double target)
{
    const auto& in = model.input();
    if (in.is_constant() && in.mean() == target)
        return {model, PeriodicFn::constant(0.0)};

    const double gam = model.gamma();
    PeriodicFn shift;
    if (gam > 0.0) {
        shift = periodic_response(gam, in) - PeriodicFn::constant(target / gam);
    } else {
        if (std::abs(in.mean() - target) > 1e-12 * std::max(1.0, std::abs(target)))
            throw ConfigError("with gamma = 0 a constant-input reduction needs target equal to the input mean; "
                              "otherwise the shift is unbounded");
        const PeriodicFn osc = periodic_response(0.0, in);
        shift = osc - PeriodicFn::constant(osc(0.0));
    }
    SifModel reduced(gam, model.eps(), PeriodicFn::constant(target), model.threshold() - shift,
                     model.reset() - shift);
    return {std::move(reduced), std::move(shift)};
}

ReducedModel reduce_to_constant_input(const SifModel& model)
{
    return reduce_to_constant_input(model, model.input().mean());
}

} // namespace sif
