#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sif/cli.hpp"
#include "sif/error.hpp"
#include "sif/io.hpp"
#include "sif/presets.hpp"
#include "sif/sweep.hpp"

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sif;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "sif");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("sif_io_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("models round-trip through JSON")
{
    const SifModel m(0.3, 0.05, PeriodicFn::fourier(1.2, {{0.1, 0.2}, {0.0, -0.05}}),
                     PeriodicFn::sinusoid(1.0, 0.25, 0.7), PeriodicFn::constant(-0.1));
    const auto back = model_from_json(parse_json(to_json(m).dump(), "mem"));
    CHECK(back.gamma() == m.gamma());
    CHECK(back.eps() == m.eps());
    CHECK(back.input() == m.input());
    CHECK(back.threshold() == m.threshold());
    CHECK(back.reset() == m.reset());
    CHECK(back.threshold().kind() == PeriodicFn::Kind::sinusoid);
}

TEST_CASE("model schema")
{
    const auto j = parse_json(R"({"gamma": 0.078125, "input": 1,
        "threshold": {"type": "sinusoid", "offset": 1, "amplitude": 0.1},
        "reset": {"type": "constant", "value": 0}})",
                              "inline");
    const auto m = model_from_json(j);
    CHECK(m.eps() == 0.0);
    CHECK(m.threshold().phase() == 0.0);
    CHECK(m.input().is_constant());

    CHECK_THROWS_AS(model_from_json(parse_json(R"({"gamma": 1, "input": 1, "threshold": 1})", "x")), ConfigError);
    CHECK_THROWS_AS(periodic_from_json(parse_json(R"({"type": "square"})", "x"), "g"), ConfigError);
    CHECK_THROWS_AS(periodic_from_json(parse_json(R"({"type": "sinusoid", "offset": 1})", "x"), "g"), ConfigError);
    CHECK_THROWS_AS(periodic_from_json(parse_json(R"({"type": "constant", "value": "one"})", "x"), "g"), ConfigError);
}

TEST_CASE("syntax errors report line and column")
{
    try {
        parse_json("{\n  \"gamma\": 1\n  \"eps\": 0.1\n}", "cfg.json");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("cfg.json:3:") != std::string::npos);
    }
    CHECK_THROWS_AS(load_json("/nonexistent/sif.json"), ConfigError);
}

TEST_CASE("number formatting and CSV rows")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(1e-20) == "9.9999999999999995e-21");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

    const auto path = fs::temp_directory_path() / "sif_io_rows.csv";
    {
        CsvWriter w(path.string(), {"a", "b", "c"});
        w << 0.5 << 3LL << std::string("x");
        w.end_row();
        w << 1e-20;
        w.skip() << 2.0;
        w.end_row();
        w << 1.0;
        CHECK_THROWS_AS(w.end_row(), ConfigError);
    }
    CHECK(slurp(path).rfind("a,b,c\n0.5,3,x\n9.9999999999999995e-21,,2\n", 0) == 0);
    fs::remove(path);
}

TEST_CASE("summaries and reports serialize")
{
    const auto r = analyze_map(example_preset(2).model(0.0));
    const auto j = to_json(r);
    CHECK(j.contains("orbits"));
    CHECK(j.at("discontinuities").size() == 1);
    const auto s = to_json(SampleSummary{1.0, 2.0, 0.0, -1.0});
    CHECK(s.at("stdev") == 2.0);
    const auto p = to_json(predict_spectrum(r, 0.2));
    CHECK(p.is_object());
}

TEST_CASE("presets reproduce their reference values")
{
    CHECK(example_presets().size() == 6);
    CHECK_THROWS_AS(example_preset(0), ConfigError);
    CHECK_THROWS_AS(example_preset(7), ConfigError);
    for (const auto& preset : example_presets()) {
        const auto report = analyze_map(preset.model(0.0));
        const auto predicted = predict_spectrum(report, 0.01);
        const auto checks = check_preset(preset, report, &predicted);
        CHECK_FALSE(checks.empty());
        for (const auto& c : checks) {
            CAPTURE(preset.id);
            CAPTURE(c.name);
            CAPTURE(c.expected);
            CAPTURE(c.actual);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("sweep")
{
    CHECK(linspace(0.0, 1.0, 5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(linspace(2.0, 3.0, 1) == std::vector<double>{2.0});

    const auto a = sweep_cell(example_gamma, 1.0, 0.1, 8);
    CHECK(a.status == "locked");
    CHECK(a.period == 1);
    const auto b = sweep_cell(example_gamma, 2.0, 0.9, 8);
    CHECK(b.status == "locked");
    CHECK(b.period == 4);

    const auto r = sweep_cell(example_gamma, 1.0, 0.0, 8);
    CHECK(r.status == "rotation");
    CHECK(r.multiplier == 1.0);
    const double T = -std::log(1.0 - example_gamma / 1.0) / example_gamma;
    CHECK(r.rotation == doctest::Approx(T - std::floor(T)));

    CHECK(sweep_cell(example_gamma, 0.05, 0.1, 8).status == "no_firing");

    SweepSpec spec;
    spec.inputs = linspace(0.8, 2.0, 4);
    spec.ks = linspace(0.0, 0.4, 3);
    omp_set_num_threads(3);
    const auto par = sweep(spec);
    const auto ser = sweep_serial(spec);
    REQUIRE(par.size() == 12);
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].input == spec.inputs[i / 3]);
        CHECK(par[i].k == spec.ks[i % 3]);
        CHECK(par[i].status == ser[i].status);
        CHECK(par[i].period == ser[i].period);
        CHECK(par[i].multiplier == ser[i].multiplier);
    }
}

TEST_CASE("hash")
{
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("command output is reproducible")
{
    const auto a = scratch("rep_a"), b = scratch("rep_b");
    for (const auto& dir : {a, b})
        CHECK(cli({"mc", "--example", "1", "--eps", "0.05", "--trials", "300", "--dt", "1e-3", "--samples", "--seed",
                   "42", "--out", dir.string()}) == 0);
    CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
    CHECK_FALSE(slurp(a / "samples.csv").empty());

    const auto c = scratch("rep_c");
    CHECK(cli({"mc", "--example", "1", "--eps", "0.05", "--trials", "300", "--dt", "1e-3", "--samples", "--seed",
               "43", "--out", c.string()}) == 0);
    CHECK(slurp(a / "samples.csv") != slurp(c / "samples.csv"));

    const auto manifest = parse_json(slurp(a / "manifest.json"), "manifest");
    CHECK(manifest.at("seed") == 42);
    CHECK(manifest.at("exit_code") == 0);
    CHECK(manifest.at("outputs").size() >= 2);
    CHECK(manifest.at("config_hash") == parse_json(slurp(b / "manifest.json"), "manifest").at("config_hash"));
    for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("exit codes")
{
    const auto d = scratch("codes");
    CHECK(cli({"predict", "--out", d.string()}) == 2);
    CHECK(fs::exists(d / "manifest.json"));
    fs::remove_all(d);
    CHECK(cli({"example", "--example", "9", "--out", d.string()}) == 2);
    CHECK(fs::exists(d / "manifest.json"));
    CHECK(cli({"analyze-map", "--example", "1", "--grid", "50", "--out", d.string()}) == 0);
    fs::remove_all(d);
}
