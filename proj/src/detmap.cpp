#include "sif/detmap.hpp"

#include "numeric.hpp"
#include "sif/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sif {

namespace {

constexpr double march_step = 1.0 / 512.0;
constexpr double horizon_periods = 50.0;
constexpr double tangency_tol = 1e-10;
constexpr double discontinuity_exclusion = 1e-6;

enum class Event { hit, cross };

struct Gap {
    const SifModel& m;
    double t0, x0;
    double value(double t) const { return m.flow(t, t0, x0) - m.threshold()(t); }
    double slope(double t) const
    {
        return m.drift(t, m.flow(t, t0, x0)) - m.threshold().derivative(t);
    }
};

// March forward from t0 on a fixed step looking for the first contact with the
// threshold. Sign changes of the gap mark crossings; a +/- change of its slope
// marks a local maximum that is tested against the tangency tolerance.
double march(const SifModel& m, double t0, double x0, Event mode)
{
    if (!(x0 < m.threshold()(t0)))
        throw ConfigError("start value " + std::to_string(x0) + " is not below the threshold at t0=" +
                          std::to_string(t0));
    const Gap gap{m, t0, x0};
    auto F = [&](double t) { return gap.value(t); };
    auto neg_slope = [&](double t) { return -gap.slope(t); };

    double tp = t0;
    double dp = gap.slope(t0);
    const long max_steps = static_cast<long>(horizon_periods / march_step);
    for (long k = 1; k <= max_steps; ++k) {
        const double tc = t0 + static_cast<double>(k) * march_step;
        const double fc = gap.value(tc);
        const double dc = gap.slope(tc);
        const bool peak = dp > 0.0 && dc <= 0.0;
        double tpk = tc, fpk = fc;
        if (peak) {
            tpk = detail::bisect_up(neg_slope, tp, tc);
            fpk = gap.value(tpk);
        }
        if (mode == Event::hit) {
            if (peak && fpk >= -tangency_tol) return fpk > 0.0 ? detail::bisect_up(F, tp, tpk) : tpk;
            if (fc >= 0.0) return detail::bisect_up(F, tp, tc);
        } else {
            if (peak && fpk > 0.0) return detail::bisect_up(F, tp, tpk);
            if (fc > 0.0) return detail::bisect_up(F, tp, tc);
        }
        tp = tc;
        dp = dc;
    }
    throw no_crossing("no threshold crossing within 50 periods of t0=" + std::to_string(t0) +
                      " (condition A violated or near-violated?)");
}

} // namespace

double hit_time(const SifModel& model, double t0, double x0) { return march(model, t0, x0, Event::hit); }

double crossing_time(const SifModel& model, double t0, double x0) { return march(model, t0, x0, Event::cross); }

double crossing_time(const SifModel& model, double t0) { return crossing_time(model, t0, model.reset()(t0)); }

double map_derivative(const SifModel& model, double t0, std::span<const DiscontinuityRecord> known)
{
    for (const auto& d : known)
        if (detail::circle_distance(t0, d.phase) < discontinuity_exclusion)
            throw at_discontinuity("t0=" + std::to_string(t0) + " is within 1e-6 of discontinuity " +
                                   std::to_string(d.phase));
    const double x0 = model.reset()(t0);
    const double f = hit_time(model, t0, x0);
    const double m = model.slope_margin(f);
    if (!(m > 1e-12))
        throw at_discontinuity("grazing contact at f(t0)=" + std::to_string(f) + "; map not differentiable");
    const double source = model.input()(t0) - model.gamma() * x0 - model.reset().derivative(t0);
    return std::exp(-model.gamma() * (f - t0)) * source / m;
}

// ---------------------------------------------------------------------------
// FiringMap

FiringMap::FiringMap(const SifModel& model, int grid) : model_(model), grid_(grid)
{
    if (grid_ < 16) throw ConfigError("firing map grid must have at least 16 points");
    lift_samples_.resize(static_cast<std::size_t>(grid_));
    for (int i = 0; i < grid_; ++i) lift_samples_[static_cast<std::size_t>(i)] = lift(static_cast<double>(i) / grid_);
    detect_discontinuities();
    detect_tangencies();
    std::sort(discontinuities_.begin(), discontinuities_.end(),
              [](const auto& a, const auto& b) { return a.phase < b.phase; });
    build_pieces();
}

double FiringMap::lift(double t0) const { return hit_time(model_, t0, model_.reset()(t0)); }

double FiringMap::crossing(double t0) const { return crossing_time(model_, t0); }

double FiringMap::phase_map(double theta) const { return detail::wrap_phase(lift(theta)); }

double FiringMap::iterate_lift(double t0, int n) const
{
    double t = t0;
    for (int i = 0; i < n; ++i) t = lift(t);
    return t;
}

double FiringMap::derivative(double t0) const { return map_derivative(model_, t0, discontinuities_); }

double FiringMap::distance_to_discontinuity(double theta) const
{
    double best = 1.0;
    for (const auto& d : discontinuities_) best = std::min(best, detail::circle_distance(theta, d.phase));
    return best;
}

namespace {

struct JumpSide {
    double phase, left, right;
};

} // namespace

void FiringMap::detect_discontinuities()
{
    const auto n = static_cast<std::size_t>(grid_);
    auto next_value = [&](std::size_t i) { return i + 1 < n ? lift_samples_[i + 1] : lift_samples_[0] + 1.0; };
    std::vector<double> steps(n);
    for (std::size_t i = 0; i < n; ++i) steps[i] = next_value(i) - lift_samples_[i];
    std::vector<double> mags(n);
    std::transform(steps.begin(), steps.end(), mags.begin(), [](double s) { return std::abs(s); });
    std::nth_element(mags.begin(), mags.begin() + static_cast<long>(n / 2), mags.end());
    const double threshold = std::max(10.0 * mags[n / 2], 1e-12);

    nondecreasing_ = std::all_of(steps.begin(), steps.end(), [](double s) { return s >= -1e-12; });

    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(steps[i]) <= threshold) continue;
        double a = static_cast<double>(i) / grid_, b = static_cast<double>(i + 1) / grid_;
        double fa = lift_samples_[i], fb = next_value(i);
        while (b - a > 1e-9) {
            const double mid = 0.5 * (a + b);
            const double fm = lift(mid);
            if (std::abs(fm - fa) > std::abs(fb - fm)) { b = mid; fb = fm; }
            else { a = mid; fa = fm; }
        }
        if (std::abs(fb - fa) <= 1e-5) continue;

        DiscontinuityRecord rec;
        rec.phase = detail::wrap_phase(0.5 * (a + b));
        rec.f_at = std::min(fa, fb);
        rec.f_star_at = std::max(fa, fb);
        rec.kind = DiscontinuityKind::jump;
        // The start on the missing side stays below g between the two contacts.
        const double start = fa > fb ? a : b;
        const double x0 = model_.reset()(start);
        bool below = true;
        constexpr int samples = 256;
        const double span = rec.f_star_at - rec.f_at;
        for (int s = 1; s < samples; ++s) {
            const double t = rec.f_at + span * (0.01 + 0.98 * s / samples);
            if (model_.flow(t, start, x0) - model_.threshold()(t) >= 1e-9) { below = false; break; }
        }
        rec.gap_verified = below;
        discontinuities_.push_back(rec);
    }
}

void FiringMap::detect_tangencies()
{
    // Continuous tangencies (f* = f with zero slope gap) do not show up as jumps;
    // look for isolated minima of the slope gap along the map instead.
    const auto n = static_cast<std::size_t>(grid_);
    std::vector<double> gap(n);
    for (std::size_t i = 0; i < n; ++i) gap[i] = model_.slope_margin(lift_samples_[i]);
    const double h = 1.0 / grid_;
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = gap[(i + n - 1) % n], cur = gap[i], nxt = gap[(i + 1) % n];
        if (!(cur <= prev && cur < nxt && cur < 1e-2)) continue;
        const double c = static_cast<double>(i) * h;
        if (distance_to_discontinuity(c) < 3.0 * h) continue;
        auto neg = [&](double t) { return -model_.slope_margin(lift(t)); };
        const auto [x, fx] = detail::golden_max(neg, c - h, c + h, 1e-11);
        if (-fx > 1e-7) continue;
        DiscontinuityRecord rec;
        rec.phase = detail::wrap_phase(x);
        rec.f_at = lift(x);
        rec.f_star_at = rec.f_at;
        rec.kind = DiscontinuityKind::continuous_tangency;
        rec.gap_verified = true;
        discontinuities_.push_back(rec);
    }
}

void FiringMap::build_pieces()
{
    const auto n = static_cast<std::size_t>(grid_);
    std::vector<JumpSide> jumps;
    for (const auto& d : discontinuities_) {
        if (d.kind != DiscontinuityKind::jump) continue;
        const double l = lift(d.phase - 5e-10), r = lift(d.phase + 5e-10);
        jumps.push_back({d.phase, l, r});
    }
    pieces_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = static_cast<double>(i) / grid_;
        const double b = static_cast<double>(i + 1) / grid_;
        const double fa = lift_samples_[i];
        const double fb = i + 1 < n ? lift_samples_[i + 1] : lift_samples_[0] + 1.0;
        double cut_a = a;
        double cut_fa = fa;
        for (const auto& j : jumps) {
            if (j.phase > a && j.phase < b) {
                pieces_.push_back({cut_a, j.phase, cut_fa, j.left});
                cut_a = j.phase;
                cut_fa = j.right;
            }
        }
        pieces_.push_back({cut_a, b, cut_fa, fb});
    }
    piece_starts_.resize(pieces_.size());
    std::transform(pieces_.begin(), pieces_.end(), piece_starts_.begin(), [](const Piece& p) { return p.a; });
}

const FiringMap::Piece& FiringMap::piece_at(double u) const
{
    auto it = std::upper_bound(piece_starts_.begin(), piece_starts_.end(), u);
    const auto idx = it == piece_starts_.begin() ? 0 : static_cast<std::size_t>(it - piece_starts_.begin()) - 1;
    return pieces_[idx];
}

double FiringMap::approx_lift(double t0) const
{
    const double j = std::floor(t0);
    const double u = t0 - j;
    const Piece& p = piece_at(u);
    const double w = p.b > p.a ? (u - p.a) / (p.b - p.a) : 0.0;
    return j + p.fa + w * (p.fb - p.fa);
}

std::optional<double> FiringMap::approx_inverse(double y) const
{
    if (!nondecreasing_) return std::nullopt;
    const double base = pieces_.front().fa;
    const double target = base + detail::wrap_phase(y - base);
    // Pieces are ordered by phase and, for a nondecreasing lift, by value.
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), target,
                               [](double v, const Piece& p) { return v < p.fa; });
    if (it == pieces_.begin()) return std::nullopt;
    const Piece& p = *(it - 1);
    if (target > p.fb) return std::nullopt; // falls in a jump gap
    const double w = p.fb > p.fa ? (target - p.fa) / (p.fb - p.fa) : 0.0;
    return detail::wrap_phase(p.a + w * (p.b - p.a));
}

std::vector<double> FiringMap::preimages(double y) const
{
    std::vector<double> out;
    for (const auto& p : pieces_) {
        const double lo = std::min(p.fa, p.fb), hi = std::max(p.fa, p.fb);
        for (double v = y + std::ceil(lo - y); v <= hi; v += 1.0) {
            const bool increasing = p.fb >= p.fa;
            double a = p.a, b = p.b;
            for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
                const double mid = 0.5 * (a + b);
                const bool below = lift(mid) < v;
                if (below == increasing) a = mid; else b = mid;
            }
            const double root = detail::wrap_phase(0.5 * (a + b));
            const bool dup = std::any_of(out.begin(), out.end(),
                                         [&](double r) { return detail::circle_distance(r, root) < 1e-10; });
            if (!dup) out.push_back(root);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<DiscontinuityRecord> find_discontinuities(const SifModel& model)
{
    return FiringMap(model).discontinuities();
}

// ---------------------------------------------------------------------------
// Orbits

namespace {

constexpr int seed_count = 256;
constexpr int max_iterations = 2000;
constexpr double cycle_tol = 1e-9;

struct Candidate {
    double phase;
    int period;
};

template <class Step>
std::optional<Candidate> detect_cycle(double seed, int max_period, Step&& step)
{
    std::vector<double> hist;
    hist.reserve(max_iterations + 1);
    hist.push_back(detail::wrap_phase(seed));
    for (int k = 1; k <= max_iterations; ++k) {
        const auto next = step(hist.back());
        if (!next) return std::nullopt;
        hist.push_back(detail::wrap_phase(*next));
        for (int kappa = 1; kappa <= max_period && kappa <= k; ++kappa)
            if (detail::circle_distance(hist[static_cast<std::size_t>(k)], hist[static_cast<std::size_t>(k - kappa)]) <
                cycle_tol)
                return Candidate{hist.back(), kappa};
    }
    return std::nullopt;
}

std::optional<OrbitRecord> polish(const FiringMap& map, Candidate cand)
{
    double theta = cand.phase;
    const int kappa = cand.period;
    try {
        const long winding = std::lround(map.iterate_lift(theta, kappa) - theta);
        double residual = 1.0;
        double mult = 1.0;
        std::vector<double> lifts(static_cast<std::size_t>(kappa) + 1);
        for (int it = 0; it < 40; ++it) {
            lifts[0] = theta;
            mult = 1.0;
            for (int i = 0; i < kappa; ++i) {
                mult *= map.derivative(lifts[static_cast<std::size_t>(i)]);
                lifts[static_cast<std::size_t>(i) + 1] = map.lift(lifts[static_cast<std::size_t>(i)]);
            }
            residual = lifts[static_cast<std::size_t>(kappa)] - theta - static_cast<double>(winding);
            if (std::abs(residual) < 1e-13) break;
            const double delta = residual / (mult - 1.0);
            if (!std::isfinite(delta) || std::abs(delta) > 1e-2) return std::nullopt;
            theta -= delta;
        }
        if (std::abs(residual) >= 1e-10) return std::nullopt;

        OrbitRecord rec;
        rec.period = kappa;
        rec.winding = winding;
        rec.multiplier = mult;
        rec.stable = std::abs(mult) < 1.0;
        for (int i = 0; i < kappa; ++i) rec.phases.push_back(detail::wrap_phase(lifts[static_cast<std::size_t>(i)]));
        // Start the cycle at its smallest phase.
        const auto first = std::min_element(rec.phases.begin(), rec.phases.end());
        std::rotate(rec.phases.begin(), first, rec.phases.end());
        for (double p : rec.phases)
            if (map.distance_to_discontinuity(p) < discontinuity_exclusion) return std::nullopt;
        return rec;
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

bool same_orbit(const OrbitRecord& a, const OrbitRecord& b)
{
    if (a.period != b.period) return false;
    auto sa = a.phases, sb = b.phases;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (detail::circle_distance(sa[i], sb[i]) > 1e-7) return false;
    return true;
}

} // namespace

std::vector<OrbitRecord> find_orbits(const FiringMap& map, int max_period)
{
    if (max_period < 1) throw ConfigError("max period must be >= 1");
    std::vector<Candidate> cands;
    for (int s = 0; s < seed_count; ++s) {
        const double seed = (s + 0.5) / seed_count;
        if (auto c = detect_cycle(seed, max_period, [&](double th) -> std::optional<double> { return map.approx_lift(th); }))
            cands.push_back(*c);
    }
    if (map.nondecreasing()) {
        // Repelling cycles of f are attracting for the inverse branch.
        for (int s = 0; s < seed_count; ++s) {
            const double seed = (s + 0.5) / seed_count;
            if (auto c = detect_cycle(seed, max_period, [&](double th) { return map.approx_inverse(th); }))
                cands.push_back(*c);
        }
    }

    std::vector<OrbitRecord> orbits;
    for (const auto& c : cands) {
        // Skip candidates already covered before paying for a polish.
        const bool seen = std::any_of(orbits.begin(), orbits.end(), [&](const OrbitRecord& o) {
            if (o.period != c.period) return false;
            return std::any_of(o.phases.begin(), o.phases.end(),
                               [&](double p) { return detail::circle_distance(p, c.phase) < 1e-5; });
        });
        if (seen) continue;
        auto rec = polish(map, c);
        if (!rec) continue;
        const bool dup = std::any_of(orbits.begin(), orbits.end(), [&](const auto& o) { return same_orbit(o, *rec); });
        if (!dup) orbits.push_back(std::move(*rec));
    }
    std::sort(orbits.begin(), orbits.end(), [](const OrbitRecord& a, const OrbitRecord& b) {
        if (a.period != b.period) return a.period < b.period;
        if (a.stable != b.stable) return a.stable;
        return a.phases.front() < b.phases.front();
    });
    return orbits;
}

std::vector<OrbitRecord> find_orbits(const SifModel& model, int max_period)
{
    return find_orbits(FiringMap(model), max_period);
}

// ---------------------------------------------------------------------------
// Conditions (D1)-(D3)

DConditions check_D_conditions(const ReturnMapReport& report, const FiringMap& map, int ell_cap)
{
    DConditions out;
    std::vector<int> stable;
    for (std::size_t i = 0; i < report.orbits.size(); ++i)
        if (report.orbits[i].stable) stable.push_back(static_cast<int>(i));

    out.d1 = !stable.empty();
    if (!out.d1) out.diagnostics += "no stable periodic orbit found; ";

    if (stable.size() == 1) {
        const auto& P = report.orbits[static_cast<std::size_t>(stable.front())];
        out.attracting_orbit = stable.front();
        constexpr int seeds = 512;
        int failures = 0;
        for (int s = 0; s < seeds; ++s) {
            double th = (s + 0.5) / seeds;
            bool hit = false;
            for (int k = 0; k < max_iterations && !hit; ++k) {
                for (double p : P.phases)
                    if (detail::circle_distance(th, p) < 1e-6) { hit = true; break; }
                th = detail::wrap_phase(map.approx_lift(th));
            }
            if (!hit) ++failures;
        }
        out.d2 = failures == 0;
        if (!out.d2) out.diagnostics += std::to_string(failures) + " of 512 seeds did not reach P; ";
    } else if (stable.size() > 1) {
        out.diagnostics += "more than one stable orbit; ";
    }

    std::vector<double> D;
    for (const auto& d : report.discontinuities) D.push_back(d.phase);
    std::vector<double> level = D;
    for (int l = 1; l <= ell_cap; ++l) {
        std::vector<double> next;
        if (!level.empty()) {
            for (double y : level)
                for (double p : map.preimages(y)) next.push_back(p);
        }
        std::sort(next.begin(), next.end());
        out.preimages.push_back(next);
        if (next.empty()) { out.ell = l; break; }
        if (next.size() > 4096) { out.diagnostics += "preimage sets grow without bound; "; break; }
        level = std::move(next);
    }
    if (!out.ell) {
        out.diagnostics += "f^{-l}(D) nonempty for every l up to " + std::to_string(ell_cap) + "; ";
    } else {
        bool clear = true;
        for (double e : report.image_set) {
            double t = e;
            for (int i = 0; i < *out.ell && clear; ++i) {
                for (double d : D)
                    if (detail::circle_distance(t, d) < discontinuity_exclusion) clear = false;
                if (i + 1 < *out.ell) t = map.phase_map(t);
            }
        }
        out.d3 = clear;
        if (!clear) out.diagnostics += "an iterate of E meets D; ";
    }
    return out;
}

DConditions check_D_conditions(const ReturnMapReport& report, const SifModel& model, int ell_cap)
{
    return check_D_conditions(report, FiringMap(model), ell_cap);
}

ReturnMapReport analyze_map(const FiringMap& map, int max_period, int ell_cap)
{
    ReturnMapReport r;
    r.conditions = check_conditions(map.model());
    r.discontinuities = map.discontinuities();
    for (const auto& d : r.discontinuities) {
        const double a = detail::wrap_phase(d.f_at), b = detail::wrap_phase(d.f_star_at);
        r.image_set.push_back(a);
        if (detail::circle_distance(a, b) > 1e-9) r.image_set.push_back(b);
    }
    r.conditions.condBprime = std::all_of(r.discontinuities.begin(), r.discontinuities.end(),
                                          [](const auto& d) { return d.gap_verified; });
    r.orbits = find_orbits(map, max_period);
    r.d = check_D_conditions(r, map, ell_cap);
    r.continuous_theory_applies =
        r.conditions.condA.holds && r.conditions.condB.holds && r.discontinuities.empty() && r.d.d2;
    return r;
}

ReturnMapReport analyze_map(const SifModel& model, int max_period, int ell_cap)
{
    return analyze_map(FiringMap(model), max_period, ell_cap);
}

// ---------------------------------------------------------------------------
// Limiting spectrum

namespace {

void push_roots(std::vector<LimitEntry>& out, double modulus, double arg, int kappa, SpectrumGenerator gen)
{
    const double root_mod = std::pow(modulus, 1.0 / kappa);
    for (int r = 0; r < kappa; ++r) {
        double a = (arg + 2.0 * std::numbers::pi * r) / kappa;
        a = std::remainder(a, 2.0 * std::numbers::pi);
        double re = root_mod * std::cos(a), im = root_mod * std::sin(a);
        if (std::abs(a) < 1e-12) im = 0.0;
        if (std::abs(std::abs(a) - std::numbers::pi) < 1e-12) { im = 0.0; re = -root_mod; }
        if (std::abs(std::abs(a) - std::numbers::pi / 2) < 1e-12) re = 0.0;
        gen.root = r;
        out.push_back({{re, im}, gen});
    }
}

} // namespace

LimitSpectrum predict_spectrum(const ReturnMapReport& report, double r_min)
{
    if (!(r_min > 0.0 && r_min < 1.0)) throw ConfigError("modulus floor must lie in (0, 1)");
    LimitSpectrum out;
    out.cutoff = r_min;
    std::vector<int> stable_ids, unstable_ids;
    if (report.continuous_theory_applies) {
        out.basis = "continuous";
        for (std::size_t i = 0; i < report.orbits.size(); ++i)
            (report.orbits[i].stable ? stable_ids : unstable_ids).push_back(static_cast<int>(i));
    } else if (report.d.d1 && report.d.d2 && report.d.d3 && report.d.attracting_orbit >= 0) {
        out.basis = "discontinuous";
        stable_ids.push_back(report.d.attracting_orbit);
    } else {
        throw prediction_invalid("neither the continuous-map hypotheses (A, B, one attracting orbit) nor "
                                 "D1-D3 are verified: " + report.d.diagnostics);
    }

    for (int id : stable_ids) {
        const auto& o = report.orbits[static_cast<std::size_t>(id)];
        const double c = o.multiplier;
        for (int n = 0;; ++n) {
            const double mod = std::pow(std::abs(c), n);
            if (n > 0 && (c == 0.0 || std::pow(mod, 1.0 / o.period) < r_min)) break;
            const double arg = (c < 0.0 && n % 2 == 1) ? std::numbers::pi : 0.0;
            push_roots(out.entries, mod, arg, o.period, {id, n, 0, false});
            if (n > 10000) break;
        }
    }
    for (int id : unstable_ids) {
        const auto& o = report.orbits[static_cast<std::size_t>(id)];
        const double c = o.multiplier;
        for (int n = 0;; ++n) {
            const double mod = std::pow(std::abs(c), -(n + 1));
            if (std::pow(mod, 1.0 / o.period) < r_min) break;
            const double arg = (c < 0.0 && n % 2 == 1) ? std::numbers::pi : 0.0;
            push_roots(out.entries, mod, arg, o.period, {id, n, 0, true});
        }
    }
    std::stable_sort(out.entries.begin(), out.entries.end(), [](const LimitEntry& a, const LimitEntry& b) {
        const double ma = std::abs(a.value), mb = std::abs(b.value);
        if (std::abs(ma - mb) > 1e-12) return ma > mb;
        const double aa = std::arg(a.value), ab = std::arg(b.value);
        if (std::abs(std::abs(aa) - std::abs(ab)) > 1e-12) return std::abs(aa) < std::abs(ab);
        return aa > ab;
    });
    return out;
}

} // namespace sif
