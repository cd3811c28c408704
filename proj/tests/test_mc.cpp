#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sif/detmap.hpp"
#include "sif/error.hpp"
#include "sif/fptd.hpp"
#include "sif/markov.hpp"
#include "sif/mc.hpp"
#include "sif/presets.hpp"
#include "support.hpp"

#include <omp.h>

#include <cmath>
#include <cstring>
#include <random>

using namespace sif;

namespace {

SimConfig config(double dt, std::size_t trials, std::uint64_t seed, bool bridge = true)
{
    SimConfig c;
    c.dt = dt;
    c.trials = trials;
    c.seed = seed;
    c.bridge_correction = bridge;
    return c;
}

double volterra_mean(const FptdGrid& g)
{
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < g.density.size(); ++i)
        m += 0.5 * g.step * (g.time(i) * g.density[i] + g.time(i + 1) * g.density[i + 1]);
    return m / g.cumulative.back();
}

} // namespace

TEST_CASE("OU passage statistics")
{
    const auto s = simulate_hit(ou_model(), 0.0, ou_x0, config(1e-4, 100000, 1));
    CHECK(s.times.size() == 100000);
    CHECK(std::abs(s.summary.mean - std::log(1.5)) < 0.003);
    CHECK(std::abs(s.summary.stdev / std::sqrt(5.0 / 1800.0) - 1.0) < 0.05);
    for (double t : s.times) CHECK_UNARY(t > 0.0);
}

TEST_CASE("small noise: centred on the deterministic time and nearly gaussian")
{
    const auto m = ou_model(0.01);
    const auto s = simulate_hit(m, 0.0, ou_x0, config(1e-4, 10000, 2));
    const double f = hit_time(m, 0.0, ou_x0);
    const double se = s.summary.stdev / std::sqrt(10000.0);
    CHECK(std::abs(s.summary.mean - f) < 3.0 * se);
    CHECK(std::abs(s.summary.skewness) < 0.1);
}

TEST_CASE("bridge correction and step refinement")
{
    const auto m = ou_model();
    const auto on3 = simulate_hit(m, 0.0, ou_x0, config(1e-3, 50000, 3, true));
    const auto off3 = simulate_hit(m, 0.0, ou_x0, config(1e-3, 50000, 4, false));
    const auto on4 = simulate_hit(m, 0.0, ou_x0, config(1e-4, 20000, 5, true));
    const auto off4 = simulate_hit(m, 0.0, ou_x0, config(1e-4, 20000, 6, false));
    const auto off2 = simulate_hit(m, 0.0, ou_x0, config(1e-2, 50000, 7, false));

    const double gap3 = off3.summary.mean - on3.summary.mean;
    const double gap4 = off4.summary.mean - on4.summary.mean;
    CHECK(gap3 > 0.0);
    CHECK(std::abs(gap4) < gap3);

    VolterraOptions o;
    o.step = 1e-4;
    const double ref = volterra_mean(solve_volterra(m, 0.0, ou_x0, o));
    const double b2 = std::abs(off2.summary.mean - ref);
    const double b3 = std::abs(off3.summary.mean - ref);
    const double b4 = std::abs(off4.summary.mean - ref);
    CHECK(b2 > b3);
    CHECK(b3 > b4);
}

TEST_CASE("seeded determinism across thread counts")
{
    const auto m = example_preset(1).model(0.05);
    const auto cfg = config(1e-3, 400, 99);
    const auto serial = simulate_hit_serial(m, 0.3, 0.0, cfg);
    for (int threads : {1, 2, 4}) {
        omp_set_num_threads(threads);
        const auto par = simulate_hit(m, 0.3, 0.0, cfg);
        CHECK(std::memcmp(par.times.data(), serial.times.data(), serial.times.size() * sizeof(double)) == 0);
        CHECK(par.summary.mean == serial.summary.mean);
        CHECK(par.summary.stdev == serial.summary.stdev);
    }
    const auto other = simulate_hit_serial(m, 0.3, 0.0, config(1e-3, 400, 100));
    CHECK(other.times != serial.times);

    auto a = trial_engine(5, 17), b = trial_engine(5, 17), c = trial_engine(5, 18);
    CHECK(a() == b());
    CHECK(a() != c());
}

TEST_CASE("samples agree with the volterra distribution")
{
    const auto m = ou_model();
    const auto s = simulate_hit(m, 0.0, ou_x0, config(1e-4, 10000, 8));
    VolterraOptions o;
    o.step = 1e-4;
    const auto g = solve_volterra(m, 0.0, ou_x0, o);
    const double ks = ks_statistic(s.times, [&](double t) { return g.cumulative_at(t); });
    CHECK(ks < 1.5 * 1.63 / std::sqrt(10000.0));
}

TEST_CASE("configuration checks")
{
    const auto m = ou_model();
    CHECK_THROWS_AS(simulate_hit(m, 0.0, 0.5, config(0.0, 10, 1)), ConfigError);
    CHECK_THROWS_AS(simulate_hit(m, 0.0, 0.5, config(1e-3, 0, 1)), ConfigError);
    CHECK_THROWS_AS(simulate_hit(ou_model(0.0), 0.0, 0.5, config(1e-3, 10, 1)), ConfigError);

    const SifModel slow(1.0, 1e-3, PeriodicFn::constant(0.5), PeriodicFn::constant(1.0), PeriodicFn::constant(0.0));
    auto rng = trial_engine(1, 0);
    CHECK_THROWS_AS(simulate_passage(slow, 0.0, 0.0, config(1e-2, 1, 1), rng), NumericalError);
}

TEST_CASE("phase chain")
{
    SUBCASE("histogram approaches the stationary distribution")
    {
        const auto m = example_preset(1).model(0.05);
        const auto phases = sample_phase_chain(m, 0.5, 2000, config(1e-4, 1, 11), 100);
        CHECK(phases.size() == 2000);
        for (double p : phases) CHECK_UNARY(p >= 0.0 && p < 1.0);
        const auto pi = stationary(build_matrix(m, 200).entries);
        CHECK(total_variation(histogram(phases, 200), pi) < 0.1);
    }
    SUBCASE("weak noise clusters at the fixed point")
    {
        const auto m = example_preset(1).model(0.005);
        const auto phases = sample_phase_chain(m, 0.2, 200, config(1e-4, 1, 12), 30);
        for (double p : phases) CHECK(test::circle_distance(p, 0.5622) < 0.02);
    }
    SUBCASE("vanishing noise reproduces the firing map")
    {
        const auto m = example_preset(2).model(1e-6);
        const FiringMap map(example_preset(2).model(0.0));
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int tested = 0;
        while (tested < 20) {
            const double theta = u(rng);
            if (map.distance_to_discontinuity(theta) < 1e-3) continue;
            const auto one = sample_phase_chain(m, theta, 1, config(1e-4, 1, 14 + tested));
            CHECK(test::circle_distance(one[0], map.phase_map(theta)) < 1e-3);
            ++tested;
        }
    }
}

TEST_CASE("summary helpers")
{
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) * 0.1;
    CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(49950.0).epsilon(1e-14));
    CHECK(pairwise_sum(v.data(), 0) == 0.0);

    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.stdev == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.skewness == doctest::Approx(0.0));
    CHECK(s.kurtosis == doctest::Approx(1.64 - 3.0));

    CHECK(ks_statistic({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
    const auto h = histogram({0.05, 0.15, 0.16, 0.95}, 10);
    CHECK(h[0] == doctest::Approx(0.25));
    CHECK(h[1] == doctest::Approx(0.5));
    CHECK(h[9] == doctest::Approx(0.25));
    CHECK(total_variation({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(total_variation({0.5, 0.5}, {0.5, 0.5}) == 0.0);
}
