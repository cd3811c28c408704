#include "sif/presets.hpp"

#include "sif/error.hpp"

#include <cmath>
#include <numbers>

namespace sif {

namespace {

using C = std::complex<double>;

std::vector<ExamplePreset> make_presets()
{
    const C w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    const C i(0.0, 1.0);
    std::vector<ExamplePreset> v(6);

    v[0].id = 1;
    v[0].input = 1.0;
    v[0].k = 0.1;
    v[0].condB = true;
    v[0].orbits = {{1, true, {0.5622}, {0.5622}, 0.6142, {}}, {1, false, {0.9379}, {0.9379}, 2.6898, {}}};
    v[0].ell = {};
    v[0].limit_head = {1.0, 0.6142, 0.3772, 0.3718, 0.2317};

    v[1].id = 2;
    v[1].input = 1.0;
    v[1].k = 0.35;
    v[1].orbits = {{1, true, {0.5173}, {0.5173}, 0.2973, {}}};
    v[1].discontinuities = {{0.1178, 0.8208, 0.3946}};
    v[1].ell = 1;
    v[1].limit_head = {1.0, 0.2973, 0.0884, 0.0263};

    v[2].id = 3;
    v[2].input = 2.0;
    v[2].k = 0.2;
    v[2].condB = true;
    v[2].orbits = {{2, true, {0.3527, 0.7593}, {0.3527, 0.7593}, 0.7445, {}},
                   {2, false, {0.4654, 0.9329}, {0.4654, 0.9329}, 1.5043, {}}};
    v[2].limit_head = {1.0, -1.0, 0.8628, -0.8628, 0.8153, -0.8153, 0.7445, -0.7445};

    v[3].id = 4;
    v[3].input = 2.0;
    v[3].k = 0.5;
    v[3].orbits = {{2, true, {0.3651, 0.6586}, {0.3651, 0.6586}, 0.2544, 0.2554}};
    v[3].discontinuities = {{0.5489, 0.8567, 0.3057}};
    v[3].first_preimages = {0.1174};
    v[3].ell = 2;
    v[3].limit_head = {1.0, -1.0, 0.5044, -0.5044, 0.2544, -0.2544};

    v[4].id = 5;
    v[4].input = 2.0;
    v[4].k = 0.8;
    v[4].orbits = {{3, true, {0.4218, 0.6330, 0.7352}, {0.4281, 0.6330, 0.7352}, 0.088076, {}}};
    v[4].limit_head = {1.0, w, std::conj(w), 0.4449, 0.4449 * w, 0.4449 * std::conj(w)};

    v[5].id = 6;
    v[5].input = 2.0;
    v[5].k = 0.9;
    v[5].orbits = {{4, true, {0.4378, 0.6236, 0.6978, 0.7480}, {0.4378, 0.6236, 0.6978, 0.7480}, 0.043991, {}}};
    v[5].limit_head = {1.0, i, -i, -1.0, 0.4580, 0.4580 * i, -0.4580 * i, -0.4580};
    return v;
}

} // namespace

SifModel ExamplePreset::model(double eps) const
{
    return SifModel(example_gamma, eps, PeriodicFn::constant(input), PeriodicFn::sinusoid(1.0, k),
                    PeriodicFn::constant(0.0));
}

const std::vector<ExamplePreset>& example_presets()
{
    static const std::vector<ExamplePreset> presets = make_presets();
    return presets;
}

const ExamplePreset& example_preset(int id)
{
    if (id < 1 || id > 6) throw ConfigError("--example must be in 1..6, got " + std::to_string(id));
    return example_presets()[static_cast<std::size_t>(id - 1)];
}

SifModel ou_model(double eps)
{
    return SifModel(1.0, eps, PeriodicFn::constant(2.0), PeriodicFn::constant(1.0), PeriodicFn::constant(0.0));
}

SifModel grazing_model(double eps)
{
    return SifModel(1.0, eps, PeriodicFn::constant(1.4), PeriodicFn::sinusoid(1.0, 0.3), PeriodicFn::constant(0.0));
}

} // namespace sif

#include <algorithm>
#include <limits>

namespace sif {

namespace {

double circle_distance(double a, double b)
{
    return std::abs((a - b) - std::round(a - b));
}

// Largest distance from each expected phase to the nearest found phase.
double phase_set_error(const std::vector<double>& expected, const std::vector<double>& found)
{
    double worst = 0.0;
    for (double e : expected) {
        double best = std::numeric_limits<double>::infinity();
        for (double f : found) best = std::min(best, circle_distance(e, f));
        worst = std::max(worst, best);
    }
    return worst;
}

PresetCheck make_check(std::string name, double expected, double actual, double tol)
{
    return {std::move(name), expected, actual, tol, std::abs(actual - expected) <= tol};
}

} // namespace

std::vector<PresetCheck> check_preset(const ExamplePreset& preset, const ReturnMapReport& report,
                                      const LimitSpectrum* predicted)
{
    const double tol = preset.tolerance;
    const std::string tag = "example " + std::to_string(preset.id) + " ";
    std::vector<PresetCheck> out;
    out.push_back(make_check(tag + "condB", preset.condB ? 1.0 : 0.0,
                             report.conditions.condB.holds ? 1.0 : 0.0, 0.0));

    for (std::size_t n = 0; n < preset.orbits.size(); ++n) {
        const auto& e = preset.orbits[n];
        const std::string name = tag + (e.stable ? "stable" : "unstable") + " period-" + std::to_string(e.period);
        const OrbitRecord* best = nullptr;
        double best_err = std::numeric_limits<double>::infinity();
        for (const auto& o : report.orbits) {
            if (o.period != e.period || o.stable != e.stable) continue;
            const double err = phase_set_error(e.phases_checked, o.phases);
            if (err < best_err) {
                best_err = err;
                best = &o;
            }
        }
        if (!best) {
            out.push_back({name + " orbit found", 1.0, 0.0, 0.0, false});
            continue;
        }
        out.push_back({name + " phases", 0.0, best_err, tol, best_err <= tol});
        PresetCheck c = make_check(name + " multiplier", e.multiplier, best->multiplier, tol);
        if (!c.pass && e.multiplier_alt && std::abs(best->multiplier - *e.multiplier_alt) <= tol) {
            c.expected = *e.multiplier_alt;
            c.pass = true;
        }
        out.push_back(c);
    }

    for (const auto& d : preset.discontinuities) {
        const DiscontinuityRecord* best = nullptr;
        for (const auto& r : report.discontinuities)
            if (!best || circle_distance(r.phase, d.phase) < circle_distance(best->phase, d.phase)) best = &r;
        if (!best) {
            out.push_back({tag + "discontinuity found", 1.0, 0.0, 0.0, false});
            continue;
        }
        const auto frac = [](double x) { return x - std::floor(x); };
        out.push_back({tag + "D phase", d.phase, best->phase, tol, circle_distance(best->phase, d.phase) <= tol});
        out.push_back({tag + "E f", d.f_tilde, frac(best->f_at), tol, circle_distance(best->f_at, d.f_tilde) <= tol});
        out.push_back({tag + "E f*", d.f_star_tilde, frac(best->f_star_at), tol,
                       circle_distance(best->f_star_at, d.f_star_tilde) <= tol});
    }
    if (!preset.first_preimages.empty()) {
        const std::vector<double> found = report.d.preimages.empty() ? std::vector<double>{} : report.d.preimages[0];
        const double err = found.empty() ? std::numeric_limits<double>::infinity()
                                         : phase_set_error(preset.first_preimages, found);
        out.push_back({tag + "first preimage of D", 0.0, err, tol, err <= tol});
    }
    if (preset.ell) {
        const double got = report.d.ell ? *report.d.ell : -1.0;
        out.push_back(make_check(tag + "ell", *preset.ell, got, 0.0));
    }

    if (predicted) {
        const std::size_t k = std::min(predicted->entries.size(), preset.limit_head.size());
        std::vector<bool> used(k, false);
        for (std::size_t n = 0; n < preset.limit_head.size(); ++n) {
            const auto target = preset.limit_head[n];
            std::size_t pick = k;
            double dist = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                if (used[j]) continue;
                const double d = std::abs(predicted->entries[j].value - target);
                if (d < dist) {
                    dist = d;
                    pick = j;
                }
            }
            if (pick < k) used[pick] = true;
            out.push_back({tag + "limit eigenvalue " + std::to_string(n), 0.0, dist, tol, dist <= tol});
        }
    }
    return out;
}

} // namespace sif
