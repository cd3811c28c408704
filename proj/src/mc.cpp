#include "sif/mc.hpp"

#include "sif/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace sif {

namespace {

void check_config(const SifModel& model, const SimConfig& cfg)
{
    if (!(model.eps() > 0.0)) throw ConfigError("simulation needs eps > 0");
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be positive");
    if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
}

template <bool Parallel>
HitSample run_trials(const SifModel& model, double t0, double x0, const SimConfig& cfg)
{
    check_config(model, cfg);
    if (!(x0 < model.threshold()(t0))) throw ConfigError("start value must lie below the threshold");
    HitSample out;
    out.start_phase = t0;
    out.times.assign(cfg.trials, 0.0);
    const auto trials = static_cast<long>(cfg.trials);
    if constexpr (Parallel) {
        std::exception_ptr first;
        long first_trial = trials;
#pragma omp parallel for schedule(static)
        for (long i = 0; i < trials; ++i) {
            try {
                auto rng = trial_engine(cfg.seed, static_cast<std::uint64_t>(i));
                out.times[static_cast<std::size_t>(i)] = simulate_passage(model, t0, x0, cfg, rng);
            } catch (...) {
#pragma omp critical
                if (i < first_trial) {
                    first_trial = i;
                    first = std::current_exception();
                }
            }
        }
        if (first) std::rethrow_exception(first);
    } else {
        for (long i = 0; i < trials; ++i) {
            auto rng = trial_engine(cfg.seed, static_cast<std::uint64_t>(i));
            out.times[static_cast<std::size_t>(i)] = simulate_passage(model, t0, x0, cfg, rng);
        }
    }
    out.summary = summarize(out.times);
    return out;
}

} // namespace

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

double simulate_passage(const SifModel& model, double t0, double x0, const SimConfig& cfg, std::mt19937_64& rng)
{
    const double dt = cfg.dt;
    const double sd = model.eps() * std::sqrt(model.variance_factor(dt));
    const double bridge_scale = 2.0 / (model.eps() * model.eps() * dt);
    const auto& g = model.threshold();
    const auto max_steps = static_cast<long long>(std::ceil(max_passage_periods / dt));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    double x = x0;
    double t = t0;
    double gap = g(t0) - x0;
    for (long long k = 0; k < max_steps; ++k) {
        // grid times from t0 directly, so rounding does not accumulate
        const double t1 = t0 + static_cast<double>(k + 1) * dt;
        const double x1 = model.flow(t1, t, x) + sd * normal(rng);
        const double gap1 = g(t1) - x1;
        if (gap1 <= 0.0) return t1;
        if (cfg.bridge_correction) {
            const double p = std::exp(-bridge_scale * gap * gap1);
            if (uniform(rng) < p) return 0.5 * (t + t1);
        }
        t = t1;
        x = x1;
        gap = gap1;
    }
    throw horizon_exceeded("no firing within " + std::to_string(static_cast<int>(max_passage_periods)) +
                           " periods of t0 = " + std::to_string(t0));
}

HitSample simulate_hit(const SifModel& model, double t0, double x0, const SimConfig& cfg)
{
    return run_trials<true>(model, t0, x0, cfg);
}

HitSample simulate_hit_serial(const SifModel& model, double t0, double x0, const SimConfig& cfg)
{
    return run_trials<false>(model, t0, x0, cfg);
}

std::vector<double> sample_phase_chain(const SifModel& model, double theta0, std::size_t steps, const SimConfig& cfg,
                                       std::size_t burn_in)
{
    check_config(model, cfg);
    // one sequential chain: stream id past any trial index a run would use
    auto rng = trial_engine(cfg.seed, ~std::uint64_t{0});
    std::vector<double> phases;
    phases.reserve(steps);
    double theta = theta0 - std::floor(theta0);
    for (std::size_t n = 0; n < burn_in + steps; ++n) {
        const double tau = simulate_passage(model, theta, model.reset()(theta), cfg, rng);
        theta = tau - std::floor(tau);
        if (n >= burn_in) phases.push_back(theta);
    }
    return phases;
}

double pairwise_sum(const double* v, std::size_t n)
{
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

SampleSummary summarize(const std::vector<double>& v)
{
    SampleSummary s;
    const std::size_t n = v.size();
    if (n == 0) return s;
    s.mean = pairwise_sum(v.data(), n) / static_cast<double>(n);
    if (n < 2) return s;
    std::vector<double> d2(n), d3(n), d4(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = v[i] - s.mean;
        d2[i] = d * d;
        d3[i] = d2[i] * d;
        d4[i] = d2[i] * d2[i];
    }
    const double nn = static_cast<double>(n);
    const double m2 = pairwise_sum(d2.data(), n) / nn;
    const double m3 = pairwise_sum(d3.data(), n) / nn;
    const double m4 = pairwise_sum(d4.data(), n) / nn;
    s.stdev = std::sqrt(m2 * nn / (nn - 1.0));
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    if (samples.empty()) throw ConfigError("KS statistic of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

std::vector<double> histogram(const std::vector<double>& phases, std::size_t bins)
{
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    std::vector<double> h(bins, 0.0);
    if (phases.empty()) return h;
    for (double p : phases) {
        const double w = p - std::floor(p);
        auto b = static_cast<std::size_t>(w * static_cast<double>(bins));
        h[std::min(b, bins - 1)] += 1.0;
    }
    for (double& x : h) x /= static_cast<double>(phases.size());
    return h;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) throw ConfigError("total variation of vectors with different lengths");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

} // namespace sif
