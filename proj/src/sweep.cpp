#include "sif/sweep.hpp"

#include "sif/detmap.hpp"
#include "sif/error.hpp"

#include <cmath>

namespace sif {

std::vector<double> linspace(double lo, double hi, int count)
{
    if (count < 1) throw ConfigError("grid needs at least one point");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return v;
}

SweepCell sweep_cell(double gamma, double input, double k, int max_period)
{
    SweepCell c;
    c.input = input;
    c.k = k;
    const SifModel model(gamma, 0.0, PeriodicFn::constant(input), PeriodicFn::sinusoid(1.0, k),
                         PeriodicFn::constant(0.0));
    if (!mean_threshold_gap(model).holds) {
        c.status = "no_firing";
        return c;
    }
    if (k == 0.0) {
        // f(t) = t + T with T the constant firing interval
        const double T = gamma > 0.0 ? -std::log(1.0 - gamma / input) / gamma : 1.0 / input;
        c.status = "rotation";
        c.period = 1;
        c.multiplier = 1.0;
        c.winding = static_cast<long>(std::floor(T));
        c.rotation = T - std::floor(T);
        return c;
    }
    try {
        const auto orbits = find_orbits(model, max_period);
        const OrbitRecord* best = nullptr;
        for (const auto& o : orbits)
            if (o.stable && (!best || o.period < best->period)) best = &o;
        if (best) {
            c.status = "locked";
            c.period = best->period;
            c.winding = best->winding;
            c.multiplier = best->multiplier;
        } else {
            c.status = "unlocked";
        }
    } catch (const NumericalError&) {
        c.status = "no_firing";
    }
    return c;
}

std::vector<SweepCell> sweep_serial(const SweepSpec& spec)
{
    std::vector<SweepCell> out;
    for (double I : spec.inputs)
        for (double k : spec.ks) out.push_back(sweep_cell(spec.gamma, I, k, spec.max_period));
    return out;
}

std::vector<SweepCell> sweep(const SweepSpec& spec)
{
    const std::size_t nk = spec.ks.size();
    const auto total = static_cast<long>(spec.inputs.size() * nk);
    std::vector<SweepCell> out(static_cast<std::size_t>(total));
    std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long n = 0; n < total; ++n) {
        const auto i = static_cast<std::size_t>(n);
        try {
            out[i] = sweep_cell(spec.gamma, spec.inputs[i / nk], spec.ks[i % nk], spec.max_period);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace sif
