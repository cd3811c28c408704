#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sif/detmap.hpp"
#include "sif/error.hpp"
#include "sif/presets.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sif;
using test::circle_distance;

namespace {

SifModel grazing(double B)
{
    return SifModel(1.0, 0.0, PeriodicFn::constant(1.4), PeriodicFn::sinusoid(1.0, B), PeriodicFn::constant(0.0));
}

double orbit_set_error(const OrbitRecord& o, const std::vector<double>& expected)
{
    double worst = 0.0;
    for (double e : expected) {
        double best = 1.0;
        for (double p : o.phases) best = std::min(best, circle_distance(p, e));
        worst = std::max(worst, best);
    }
    return worst;
}

const OrbitRecord* orbit_near(const std::vector<OrbitRecord>& orbits, const std::vector<double>& phases)
{
    for (const auto& o : orbits)
        if (o.period == static_cast<int>(phases.size()) && orbit_set_error(o, phases) < 1e-3) return &o;
    return nullptr;
}

} // namespace

TEST_CASE("hit time")
{
    const auto ou = ou_model();
    CHECK(hit_time(ou, 0.0, 0.5) == doctest::Approx(std::log(1.5)).epsilon(1e-12));

    // start just below threshold with a positive slope gap
    CHECK(hit_time(ou, 0.3, 1.0 - 1e-9) - 0.3 < 1e-8);

    const auto ex1 = example_preset(1).model(0.0);
    const double t = hit_time(ex1, 0.5622, 0.0) - 0.5622;
    CHECK(std::abs(t - std::round(t)) < 2e-4);

    const SifModel dead(1.0, 0.0, PeriodicFn::constant(0.5), PeriodicFn::constant(1.0), PeriodicFn::constant(0.0));
    CHECK_THROWS_AS(hit_time(dead, 0.0, 0.0), NumericalError);
}

TEST_CASE("grazing crossings")
{
    SUBCASE("jump: the grazing start has f = 0.8087 and f* = 1.473")
    {
        const auto d = find_discontinuities(grazing_model(0.0));
        REQUIRE(d.size() == 1);
        CHECK(d[0].phase == doctest::Approx(0.0863).epsilon(2e-3));
        CHECK(d[0].f_at == doctest::Approx(0.8087).epsilon(1e-3));
        CHECK(d[0].f_star_at == doctest::Approx(1.473).epsilon(1e-3));
        CHECK(d[0].kind == DiscontinuityKind::jump);
        CHECK(d[0].gap_verified);

        // one-sided limits of the strict crossing time bracket the jump
        const auto m = grazing_model(0.0);
        const double below = crossing_time(m, d[0].phase - 1e-6);
        const double above = crossing_time(m, d[0].phase + 1e-6);
        CHECK(std::min(below, above) == doctest::Approx(0.8087).epsilon(2e-3));
        CHECK(std::max(below, above) == doctest::Approx(1.473).epsilon(2e-3));
    }
    SUBCASE("borderline modulation: f = f* at a degenerate tangency")
    {
        // largest B keeping the slope margin nonnegative; the margin vanishes once per period at tc
        const double B = 0.4 / std::sqrt(4 * std::numbers::pi * std::numbers::pi + 1);
        CHECK(B == doctest::Approx(0.0629).epsilon(1e-3));
        const double tc = 1.0 + (std::numbers::pi / 2 - std::atan2(2 * std::numbers::pi, 1.0)) / (2 * std::numbers::pi);
        const auto m = grazing(B);
        CHECK(std::abs(m.slope_margin(tc)) < 1e-12);
        // start whose trajectory passes through the tangency
        const double t0 = tc + std::log(1.0 - m.threshold()(tc) / 1.4);
        CHECK(t0 == doctest::Approx(-0.2527).epsilon(1e-3));
        const double f = hit_time(m, t0, 0.0);
        const double fs = crossing_time(m, t0);
        CHECK(f == doctest::Approx(1.0251).epsilon(1e-3));
        CHECK(fs == doctest::Approx(1.0251).epsilon(1e-3));
        CHECK(std::abs(f - fs) < 1e-6);
    }
    SUBCASE("transversal: crossing equals hit")
    {
        const auto m = example_preset(1).model(0.0);
        for (double t0 : {0.1, 0.4, 0.75}) CHECK(crossing_time(m, t0) == hit_time(m, t0, 0.0));
    }
}

TEST_CASE("map derivative")
{
    const auto ex1 = example_preset(1).model(0.0);
    CHECK(map_derivative(ex1, 0.5622) == doctest::Approx(0.6142).epsilon(1e-3));
    CHECK(map_derivative(ex1, 0.9379) == doctest::Approx(2.6898).epsilon(1e-3));

    const SifModel rot(0.0, 0.0, PeriodicFn::constant(1.3), PeriodicFn::constant(1.0), PeriodicFn::constant(0.0));
    for (double t0 : {0.0, 0.25, 0.9}) CHECK(map_derivative(rot, t0) == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("closed form agrees with centered differences")
    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int id : {1, 2, 3, 4}) {
            const auto m = example_preset(id).model(0.0);
            const FiringMap map(m);
            int tested = 0;
            while (tested < 50) {
                const double t0 = u(rng);
                if (map.distance_to_discontinuity(t0) < 1e-3) continue;
                const double fd = (map.lift(t0 + 1e-5) - map.lift(t0 - 1e-5)) / 2e-5;
                const double d = map.derivative(t0);
                CHECK(std::abs(d - fd) <= 1e-5 * std::max(1.0, std::abs(d)));
                ++tested;
            }
        }
    }
    SUBCASE("refuses to differentiate at a discontinuity")
    {
        const FiringMap map(example_preset(2).model(0.0));
        REQUIRE(map.discontinuities().size() == 1);
        CHECK_THROWS_AS(map.derivative(map.discontinuities()[0].phase), NumericalError);
    }
}

TEST_CASE("lift property and crossing consistency")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int id = 1; id <= 6; ++id) {
        const auto m = example_preset(id).model(0.0);
        const FiringMap map(m);
        for (int i = 0; i < 100; ++i) {
            const double t = u(rng);
            if (map.distance_to_discontinuity(t) < 1e-6) continue;
            CHECK(std::abs(map.lift(t + 1.0) - map.lift(t) - 1.0) < 1e-10);
        }
        for (int i = 0; i < 8; ++i) {
            const double t0 = u(rng);
            const double f = map.lift(t0);
            CHECK(std::abs(m.flow(f, t0, m.reset()(t0)) - m.threshold()(f)) < 1e-10);
            for (int s = 1; s < 1024; ++s) {
                const double t = t0 + (f - t0) * s / 1024.0;
                CHECK(m.flow(t, t0, m.reset()(t0)) - m.threshold()(t) < 0.0);
            }
        }
    }
}

TEST_CASE("orbits")
{
    SUBCASE("example 1")
    {
        const auto orbits = find_orbits(example_preset(1).model(0.0), 8);
        const auto* s = orbit_near(orbits, {0.5622});
        const auto* u = orbit_near(orbits, {0.9379});
        REQUIRE(s);
        REQUIRE(u);
        CHECK(s->stable);
        CHECK_FALSE(u->stable);
        CHECK(s->multiplier == doctest::Approx(0.6142).epsilon(1e-3));
        CHECK(u->multiplier == doctest::Approx(2.6898).epsilon(1e-3));
    }
    SUBCASE("example 3: stable and unstable period 2")
    {
        const auto orbits = find_orbits(example_preset(3).model(0.0), 8);
        const auto* s = orbit_near(orbits, {0.3527, 0.7593});
        const auto* u = orbit_near(orbits, {0.4654, 0.9329});
        REQUIRE(s);
        REQUIRE(u);
        CHECK(s->multiplier == doctest::Approx(0.7445).epsilon(1e-3));
        CHECK(u->multiplier == doctest::Approx(1.5043).epsilon(1e-3));
    }
    SUBCASE("example 6: period 4")
    {
        const auto orbits = find_orbits(example_preset(6).model(0.0), 8);
        const auto* s = orbit_near(orbits, {0.4378, 0.6236, 0.6978, 0.7480});
        REQUIRE(s);
        CHECK(s->stable);
        CHECK(s->multiplier == doctest::Approx(0.043991).epsilon(1e-4));
    }
    SUBCASE("irrational rotation has no short orbits")
    {
        // gamma = 0, g - h = 1, I = 1/(sqrt 2 - 1): firing interval sqrt 2 - 1
        const SifModel rot(0.0, 0.0, PeriodicFn::constant(1.0 / (std::sqrt(2.0) - 1.0)), PeriodicFn::constant(1.0),
                           PeriodicFn::constant(0.0));
        CHECK(find_orbits(rot, 8).empty());
    }
    SUBCASE("every reported orbit closes and its multiplier is the product of slopes")
    {
        for (int id = 1; id <= 6; ++id) {
            const auto m = example_preset(id).model(0.0);
            const FiringMap map(m);
            for (const auto& o : find_orbits(map, 8)) {
                double t = o.phases[0];
                double prod = 1.0;
                for (int i = 0; i < o.period; ++i) {
                    prod *= map_derivative(m, t, map.discontinuities());
                    t = hit_time(m, t, m.reset()(t));
                }
                CHECK(std::abs(t - o.phases[0] - static_cast<double>(o.winding)) < 1e-8);
                CHECK(std::abs(prod - o.multiplier) <= 1e-6 * std::max(1.0, std::abs(o.multiplier)));
            }
        }
    }
}

TEST_CASE("discontinuities and D conditions")
{
    CHECK(find_discontinuities(example_preset(1).model(0.0)).empty());

    SUBCASE("example 2")
    {
        const auto r = analyze_map(example_preset(2).model(0.0));
        REQUIRE(r.discontinuities.size() == 1);
        CHECK(r.discontinuities[0].phase == doctest::Approx(0.1178).epsilon(1e-3));
        const double f = r.discontinuities[0].f_at - std::floor(r.discontinuities[0].f_at);
        const double fs = r.discontinuities[0].f_star_at - std::floor(r.discontinuities[0].f_star_at);
        CHECK(circle_distance(f, 0.8208) < 1e-3);
        CHECK(circle_distance(fs, 0.3946) < 1e-3);
        CHECK(r.d.d3);
        REQUIRE(r.d.ell.has_value());
        CHECK(*r.d.ell == 1);
    }
    SUBCASE("example 4")
    {
        const auto r = analyze_map(example_preset(4).model(0.0));
        REQUIRE(r.discontinuities.size() == 1);
        CHECK(r.discontinuities[0].phase == doctest::Approx(0.5489).epsilon(1e-3));
        REQUIRE(r.image_set.size() == 2);
        for (double e : {0.8567, 0.3057})
            CHECK(std::min(circle_distance(r.image_set[0], e), circle_distance(r.image_set[1], e)) < 1e-3);
        REQUIRE_FALSE(r.d.preimages.empty());
        REQUIRE(r.d.preimages[0].size() == 1);
        CHECK(r.d.preimages[0][0] == doctest::Approx(0.1174).epsilon(1e-3));
        CHECK(r.d.d1);
        CHECK(r.d.d2);
        CHECK(r.d.d3);
        REQUIRE(r.d.ell.has_value());
        CHECK(*r.d.ell == 2);
    }
    SUBCASE("empty D is vacuous")
    {
        const auto r = analyze_map(example_preset(1).model(0.0));
        CHECK(r.d.d3);
        CHECK(r.continuous_theory_applies);
    }
}

TEST_CASE("predicted spectrum")
{
    SUBCASE("example 1 head")
    {
        const auto r = analyze_map(example_preset(1).model(0.0));
        const auto s = predict_spectrum(r, 0.2);
        const double head[] = {1.0, 0.6142, 0.3772, 0.3718, 0.2317};
        REQUIRE(s.entries.size() >= 5);
        for (int i = 0; i < 5; ++i) CHECK(std::abs(s.entries[i].value - std::complex<double>(head[i])) < 1e-3);
    }
    SUBCASE("example 5: cube roots of unity times powers of c")
    {
        const auto r = analyze_map(example_preset(5).model(0.0));
        const auto s = predict_spectrum(r, 0.3);
        const double c = std::cbrt(0.088076);
        CHECK(c == doctest::Approx(0.4449).epsilon(1e-3));
        REQUIRE(s.entries.size() == 6);
        for (const auto& e : s.entries) {
            const double mod = std::abs(e.value);
            CHECK((std::abs(mod - 1.0) < 1e-9 || std::abs(mod - c) < 1e-6));
            CHECK(std::abs(std::pow(e.value, 3) - std::pow(mod, 3)) < 1e-6);
        }
    }
    SUBCASE("superattracting fixed point gives only 1")
    {
        ReturnMapReport r;
        r.continuous_theory_applies = true;
        r.orbits.push_back({{0.3}, 1, 1, 0.0, true});
        const auto s = predict_spectrum(r, 0.01);
        REQUIRE(s.entries.size() == 1);
        CHECK(s.entries[0].value == std::complex<double>(1.0));
    }
    SUBCASE("closed under conjugation, contains 1, moduli non-increasing")
    {
        for (int id = 1; id <= 6; ++id) {
            const auto s = predict_spectrum(analyze_map(example_preset(id).model(0.0)), 0.05);
            bool has_one = false;
            for (std::size_t i = 0; i < s.entries.size(); ++i) {
                const auto z = s.entries[i].value;
                has_one |= std::abs(z - 1.0) < 1e-12;
                CHECK(std::abs(z) >= 0.05);
                if (i > 0) CHECK(std::abs(z) <= std::abs(s.entries[i - 1].value) + 1e-12);
                bool conj = false;
                for (const auto& e : s.entries) conj |= std::abs(e.value - std::conj(z)) < 1e-9;
                CHECK(conj);
            }
            CHECK(has_one);
        }
    }
    SUBCASE("refuses when no hypotheses hold")
    {
        const SifModel rot(0.0, 0.0, PeriodicFn::constant(1.0 / (std::sqrt(2.0) - 1.0)), PeriodicFn::constant(1.0),
                           PeriodicFn::constant(0.0));
        CHECK_THROWS_AS(predict_spectrum(analyze_map(rot), 0.2), ConditionError);
    }
}
