#include "sif/cli.hpp"

#include "sif/detmap.hpp"
#include "sif/eigen.hpp"
#include "sif/error.hpp"
#include "sif/fptd.hpp"
#include "sif/io.hpp"
#include "sif/markov.hpp"
#include "sif/mc.hpp"
#include "sif/presets.hpp"
#include "sif/sweep.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>

namespace sif {

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

namespace fs = std::filesystem;

struct Globals {
    std::string config;
    std::optional<int> example;
    std::string out = "out";
    std::uint64_t seed = 0;
    int threads = 0;
};

/// Everything a command produced, for the manifest.
struct RunRecord {
    std::string subcommand;
    json options = json::object();
    json model = nullptr;
    std::vector<std::string> outputs;
};

std::string hex64(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json versions()
{
    json v = {{"sif", sif_version},
              {"compiler", __VERSION__},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"cli11", CLI11_VERSION}};
#ifdef _OPENMP
    v["openmp"] = _OPENMP;
#else
    v["openmp"] = nullptr;
#endif
    return v;
}

std::string hint_for(const Error& e)
{
    const std::string& c = e.code();
    if (c == "MassDeficit") return "passage mass did not settle; check that the mean trajectory reaches the threshold or raise eps";
    if (c == "NegativeDensity") return "pass a smaller --step";
    if (c == "NoConvergence") return "the iteration did not settle; the matrix may be nearly reducible";
    if (c == "NonTransversal") return "the crossing is tangent; the Gaussian approximation does not apply at this start";
    if (c == "PredictionInvalid") return "run analyze-map to see which hypotheses fail";
    if (c == "ConditionA") return "increase the input so the mean trajectory reaches the threshold";
    if (c == "HorizonExceeded" || c == "NoCrossing") return "the trajectory does not fire within 50 periods";
    if (c == "ConfigError") return "check the flags and the model JSON";
    return "";
}

/// Resolves the model from --config or --example, with an optional eps override.
SifModel resolve_model(const Globals& g, std::optional<double> eps, RunRecord& rec)
{
    std::optional<SifModel> model;
    if (!g.config.empty()) {
        model = load_model(g.config);
    } else if (g.example) {
        model = example_preset(*g.example).model(example_eps);
    } else {
        throw ConfigError("give a model with --config PATH or --example N");
    }
    if (eps) {
        if (!(*eps >= 0.0)) throw ConfigError("--eps must be nonnegative");
        model = model->with_eps(*eps);
    }
    rec.model = to_json(*model);
    return *model;
}

std::string out_path(const Globals& g, RunRecord& rec, const std::string& name)
{
    fs::create_directories(g.out);
    const std::string p = (fs::path(g.out) / name).string();
    rec.outputs.push_back(p);
    return p;
}

double frac(double x)
{
    return x - std::floor(x);
}

// ---------------------------------------------------------------- commands

struct MapOpts {
    int grid = 1000;
    int max_period = 8;
};

void cmd_analyze_map(const Globals& g, const MapOpts& o, RunRecord& rec)
{
    if (o.grid < 1) throw ConfigError("--grid must be positive");
    rec.options = {{"grid", o.grid}, {"max_period", o.max_period}};
    const SifModel model = resolve_model(g, std::nullopt, rec);
    const FiringMap map(model);
    const ReturnMapReport report = analyze_map(map, o.max_period);
    int kappa = 1;
    if (report.d.attracting_orbit >= 0)
        kappa = report.orbits[static_cast<std::size_t>(report.d.attracting_orbit)].period;
    else
        for (const auto& orb : report.orbits)
            if (orb.stable) {
                kappa = orb.period;
                break;
            }

    CsvWriter csv(out_path(g, rec, "map.csv"), {"theta", "f_tilde", "f_kappa", "f_prime"});
    for (int i = 0; i < o.grid; ++i) {
        const double th = static_cast<double>(i) / o.grid;
        double fp = std::numeric_limits<double>::quiet_NaN();
        try {
            fp = map.derivative(th);
        } catch (const NumericalError&) {
        }
        csv << th << map.phase_map(th) << frac(map.iterate_lift(th, kappa)) << fp;
        csv.end_row();
    }
    json j = to_json(report);
    j["model"] = rec.model;
    j["kappa"] = kappa;
    write_json(out_path(g, rec, "report.json"), j);
    for (const auto& orb : report.orbits) {
        std::printf("orbit period %d %s multiplier %.6f phases", orb.period, orb.stable ? "stable" : "unstable",
                    orb.multiplier);
        for (double p : orb.phases) std::printf(" %.4f", p);
        std::printf("\n");
    }
    for (const auto& d : report.discontinuities)
        std::printf("discontinuity %.4f f %.4f f* %.4f\n", d.phase, frac(d.f_at), frac(d.f_star_at));
}

struct FptdOpts {
    double theta0 = 0.0;
    std::optional<double> x0;
    std::optional<double> eps;
    std::optional<double> step;
};

void cmd_fptd(const Globals& g, const FptdOpts& o, RunRecord& rec)
{
    const SifModel model = resolve_model(g, o.eps, rec);
    const double x0 = o.x0 ? *o.x0 : model.reset()(o.theta0);
    rec.options = {{"theta0", o.theta0}, {"x0", x0}, {"step", o.step ? json(*o.step) : json(nullptr)}};
    VolterraOptions vo;
    vo.step = o.step;
    const FptdGrid grid = solve_volterra(model, o.theta0, x0, vo);

    std::optional<GaussianFptd> gauss;
    std::string gauss_note;
    try {
        gauss = gaussian_approx(model, o.theta0, x0);
    } catch (const Error& e) {
        gauss_note = e.what();
    }
    // moments of the piecewise-linear density
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < grid.density.size(); ++i) {
        const double w = (i == 0 || i + 1 == grid.density.size()) ? 0.5 : 1.0;
        const double t = grid.time(i), p = grid.density[i] * w * grid.step;
        m0 += p;
        m1 += p * t;
        m2 += p * t * t;
    }
    const double mean = m1 / m0;
    const double stdev = std::sqrt(std::max(0.0, m2 / m0 - mean * mean));

    CsvWriter csv(out_path(g, rec, "fptd.csv"), {"t", "density", "cumulative", "gaussian_density"});
    for (std::size_t i = 0; i < grid.density.size(); ++i) {
        const double t = grid.time(i);
        csv << t << grid.density[i] << grid.cumulative[i];
        if (gauss && gauss->stdev > 0.0)
            csv << gauss->density(t);
        else
            csv.skip();
        csv.end_row();
    }
    json j = {{"mean", mean},
              {"stdev", stdev},
              {"massDeficit", grid.mass_deficit},
              {"step", grid.step},
              {"t0", grid.t0},
              {"x0", grid.x0},
              {"horizon", grid.horizon},
              {"clamped_mass", grid.clamped_mass},
              {"clamped_count", grid.clamped_count}};
    if (gauss)
        j["gaussian"] = {{"mean", gauss->mean},
                         {"stdev", gauss->stdev},
                         {"sigma_tau", gauss->sigma_tau},
                         {"slope_gap", gauss->slope_gap}};
    else
        j["gaussian"] = {{"unavailable", gauss_note}};
    write_json(out_path(g, rec, "fptd.json"), j);
    std::printf("mass deficit %.3e, step %.3e, mean %.6f, stdev %.6f\n", grid.mass_deficit, grid.step, mean, stdev);
}

struct SpectrumOpts {
    std::optional<double> eps;
    int grid = static_cast<int>(default_grid);
    double r_min = 0.2;
    bool write_matrix = false;
};

void cmd_spectrum(const Globals& g, const SpectrumOpts& o, RunRecord& rec)
{
    if (o.grid < 1 || o.grid > 1024) throw ConfigError("--grid must be in [1, 1024]");
    rec.options = {{"grid", o.grid}, {"r_min", o.r_min}, {"write_matrix", o.write_matrix}};
    const SifModel model = resolve_model(g, o.eps, rec);
    LimitSpectrum predicted;
    std::string prediction_note;
    try {
        predicted = predict_spectrum(analyze_map(model), o.r_min);
    } catch (const Error& e) {
        prediction_note = e.what();
    }
    const TransitionMatrix tm = build_matrix(model, static_cast<std::size_t>(o.grid));
    if (o.write_matrix) write_matrix(out_path(g, rec, "matrix.bin"), tm.entries);
    const SpectrumReport rep = spectrum(tm, predicted);

    std::vector<const EigenPair*> match(rep.computed.size(), nullptr);
    for (const auto& p : rep.pairs) match[p.computed] = &p;
    CsvWriter csv(out_path(g, rec, "eigenvalues.csv"),
                  {"re", "im", "modulus", "matched_prediction_re", "matched_prediction_im", "residual"});
    for (std::size_t i = 0; i < rep.computed.size(); ++i) {
        const auto z = rep.computed[i];
        csv << z.real() << z.imag() << std::abs(z);
        if (match[i]) {
            const auto pv = predicted.entries[match[i]->predicted].value;
            csv << pv.real() << pv.imag() << match[i]->residual;
        } else {
            csv.skip().skip().skip();
        }
        csv.end_row();
    }
    double max_def = 0.0;
    for (double d : tm.row_mass_deficits) max_def = std::max(max_def, std::abs(d));
    json pairs = json::array();
    for (const auto& p : rep.pairs)
        pairs.push_back({{"predicted", p.predicted}, {"computed", p.computed}, {"residual", p.residual}});
    json j = {{"n", tm.n},
              {"eps", tm.eps},
              {"qr_sweeps", rep.iterations},
              {"leading", {rep.computed[0].real(), rep.computed[0].imag()}},
              {"spectral_radius", std::abs(rep.computed[0])},
              {"max_row_mass_deficit", max_def},
              {"row_mass_deficits", tm.row_mass_deficits},
              {"pairs", pairs}};
    j["predicted"] = prediction_note.empty() ? to_json(predicted) : json{{"unavailable", prediction_note}};
    write_json(out_path(g, rec, "spectrum.json"), j);
    const std::size_t show = std::min<std::size_t>(6, rep.computed.size());
    for (std::size_t i = 0; i < show; ++i)
        std::printf("lambda_%zu = %.8f %+.8fi  |%.6f|\n", i + 1, rep.computed[i].real(), rep.computed[i].imag(),
                    std::abs(rep.computed[i]));
}

struct PredictOpts {
    double r_min = 0.2;
    int max_period = 8;
};

void cmd_predict(const Globals& g, const PredictOpts& o, RunRecord& rec)
{
    rec.options = {{"r_min", o.r_min}, {"max_period", o.max_period}};
    const SifModel model = resolve_model(g, std::nullopt, rec);
    const LimitSpectrum s = predict_spectrum(analyze_map(model, o.max_period), o.r_min);
    CsvWriter csv(out_path(g, rec, "predict.csv"), {"re", "im", "modulus", "orbit", "power", "root", "unstable"});
    for (const auto& e : s.entries) {
        csv << e.value.real() << e.value.imag() << std::abs(e.value) << static_cast<long long>(e.generator.orbit)
            << static_cast<long long>(e.generator.power) << static_cast<long long>(e.generator.root)
            << static_cast<long long>(e.generator.unstable ? 1 : 0);
        csv.end_row();
    }
    write_json(out_path(g, rec, "predict.json"), to_json(s));
    for (const auto& e : s.entries) std::printf("%.6f %+.6fi\n", e.value.real(), e.value.imag());
}

struct McOpts {
    double theta0 = 0.0;
    std::optional<double> x0;
    std::optional<double> eps;
    double dt = 1e-4;
    std::size_t trials = 10000;
    bool no_bridge = false;
    bool samples = false;
    bool no_ks = false;
    std::size_t chain = 0;
    std::size_t burn_in = 100;
};

void cmd_mc(const Globals& g, const McOpts& o, RunRecord& rec)
{
    const SifModel model = resolve_model(g, o.eps, rec);
    SimConfig cfg;
    cfg.dt = o.dt;
    cfg.trials = o.trials;
    cfg.seed = g.seed;
    cfg.bridge_correction = !o.no_bridge;
    rec.options = {{"theta0", o.theta0}, {"dt", o.dt}, {"trials", o.trials}, {"bridge_correction", !o.no_bridge},
                   {"chain", o.chain}, {"burn_in", o.burn_in}};

    if (o.chain > 0) {
        const auto phases = sample_phase_chain(model, o.theta0, o.chain, cfg, o.burn_in);
        CsvWriter csv(out_path(g, rec, "phases.csv"), {"step", "phase"});
        for (std::size_t i = 0; i < phases.size(); ++i) {
            csv << static_cast<long long>(i) << phases[i];
            csv.end_row();
        }
        json j = to_json(summarize(phases));
        j["steps"] = o.chain;
        j["burn_in"] = o.burn_in;
        write_json(out_path(g, rec, "chain.json"), j);
        std::printf("%zu phases written\n", phases.size());
        return;
    }

    const double x0 = o.x0 ? *o.x0 : model.reset()(o.theta0);
    rec.options["x0"] = x0;
    const HitSample s = simulate_hit(model, o.theta0, x0, cfg);
    if (o.samples) {
        CsvWriter csv(out_path(g, rec, "samples.csv"), {"trial", "tau"});
        for (std::size_t i = 0; i < s.times.size(); ++i) {
            csv << static_cast<long long>(i) << s.times[i];
            csv.end_row();
        }
    }
    json j = to_json(s.summary);
    j["trials"] = cfg.trials;
    j["dt"] = cfg.dt;
    j["bridge_correction"] = cfg.bridge_correction;
    j["t0"] = o.theta0;
    j["x0"] = x0;
    j["seed"] = g.seed;
    j["ks_band"] = 1.63 / std::sqrt(static_cast<double>(cfg.trials));
    j["ks_vs_volterra"] = nullptr;
    if (!o.no_ks) {
        const FptdGrid grid = solve_volterra(model, o.theta0, x0);
        j["ks_vs_volterra"] = ks_statistic(s.times, [&](double t) { return grid.cumulative_at(t); });
    }
    write_json(out_path(g, rec, "mc.json"), j);
    std::printf("mean %.6f stdev %.6f skewness %.4f\n", s.summary.mean, s.summary.stdev, s.summary.skewness);
}

struct SweepOpts {
    double gamma = example_gamma;
    double i_min = 1.0, i_max = 2.0;
    int i_count = 6;
    double k_min = 0.0, k_max = 0.9;
    int k_count = 10;
    int max_period = 8;
};

void cmd_sweep(const Globals& g, const SweepOpts& o, RunRecord& rec)
{
    SweepSpec spec;
    spec.gamma = o.gamma;
    if (!g.config.empty()) spec.gamma = load_model(g.config).gamma();
    spec.inputs = linspace(o.i_min, o.i_max, o.i_count);
    spec.ks = linspace(o.k_min, o.k_max, o.k_count);
    spec.max_period = o.max_period;
    rec.options = {{"gamma", spec.gamma}, {"inputs", spec.inputs}, {"ks", spec.ks}, {"max_period", o.max_period}};
    const auto cells = sweep(spec);
    CsvWriter csv(out_path(g, rec, "sweep.csv"), {"I", "k", "status", "period", "winding", "multiplier", "rotation"});
    for (const auto& c : cells) {
        csv << c.input << c.k << c.status << static_cast<long long>(c.period) << static_cast<long long>(c.winding)
            << c.multiplier << c.rotation;
        csv.end_row();
    }
    std::printf("%zu cells written\n", cells.size());
}

bool cmd_example(const Globals& g, RunRecord& rec)
{
    if (!g.example) throw ConfigError("example needs --example N");
    const ExamplePreset& p = example_preset(*g.example);
    rec.options = {{"example", p.id}};
    rec.model = to_json(p.model(example_eps));
    const ReturnMapReport report = analyze_map(p.model(example_eps));
    std::optional<LimitSpectrum> predicted;
    std::string note;
    try {
        predicted = predict_spectrum(report, 0.2);
    } catch (const Error& e) {
        note = e.what();
    }
    const auto checks = check_preset(p, report, predicted ? &*predicted : nullptr);
    bool ok = predicted.has_value();
    json arr = json::array();
    for (const auto& c : checks) {
        ok = ok && c.pass;
        std::printf("%s  %-40s expected %.6f actual %.6f tol %.1e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.expected, c.actual, c.tolerance);
        arr.push_back({{"name", c.name}, {"expected", c.expected}, {"actual", c.actual},
                       {"tolerance", c.tolerance}, {"pass", c.pass}});
    }
    if (!predicted) std::printf("FAIL  prediction: %s\n", note.c_str());
    json j = {{"example", p.id}, {"checks", arr}, {"pass", ok}, {"report", to_json(report)}};
    if (predicted) j["predicted"] = to_json(*predicted);
    write_json(out_path(g, rec, "example.json"), j);
    return ok;
}

void cmd_eig(const Globals& g, const std::string& matrix, RunRecord& rec)
{
    rec.options = {{"matrix", matrix}};
    const DenseMatrix m = read_matrix(matrix);
    Spectrum s = eigenvalues(m);
    sort_by_modulus(s.values);
    CsvWriter csv(out_path(g, rec, "eigenvalues.csv"), {"re", "im", "modulus"});
    std::printf("re,im,modulus\n");
    for (const auto& z : s.values) {
        csv << z.real() << z.imag() << std::abs(z);
        csv.end_row();
        std::printf("%s,%s,%s\n", format_double(z.real()).c_str(), format_double(z.imag()).c_str(),
                    format_double(std::abs(z)).c_str());
    }
}

void write_manifest(const Globals& g, const RunRecord& rec, const std::string& command, double wall, int code,
                    const std::string& error)
{
    const json hashed = {{"subcommand", rec.subcommand}, {"model", rec.model}, {"options", rec.options},
                         {"seed", g.seed}};
    json m = {{"command", command},
              {"subcommand", rec.subcommand},
              {"config_hash", hex64(fnv1a(hashed.dump()))},
              {"config", hashed},
              {"seed", g.seed},
              {"threads", g.threads},
              {"versions", versions()},
              {"wall_time_s", wall},
              {"outputs", rec.outputs},
              {"exit_code", code}};
    if (!error.empty()) m["error"] = error;
    try {
        fs::create_directories(g.out);
        write_json((fs::path(g.out) / "manifest.json").string(), m);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "warning: manifest not written: %s\n", e.what());
    }
}

} // namespace

int run_cli(int argc, char** argv)
{
    const auto start = std::chrono::steady_clock::now();
    CLI::App app{"Phase dynamics and spectra of stochastic integrate-and-fire oscillators", "sif"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", sif_version);

    Globals g;
    int example_id = 0;
    app.add_option("--config", g.config, "model JSON")->check(CLI::ExistingFile);
    auto* ex_opt = app.add_option("--example", example_id, "preset 1..6")->check(CLI::Range(1, 6));
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

    MapOpts map_o;
    auto* c_map = app.add_subcommand("analyze-map", "deterministic firing map, orbits and discontinuities");
    c_map->add_option("--grid", map_o.grid, "CSV grid points")->capture_default_str();
    c_map->add_option("--max-period", map_o.max_period)->capture_default_str();

    FptdOpts f_o;
    auto* c_fptd = app.add_subcommand("fptd", "first-passage density by the Volterra equation");
    c_fptd->add_option("--theta0", f_o.theta0, "start time")->capture_default_str();
    c_fptd->add_option("--x0", f_o.x0, "start value (default h(theta0))");
    c_fptd->add_option("--eps", f_o.eps, "noise level override");
    c_fptd->add_option("--step", f_o.step, "grid step (default from the Gaussian width)");

    SpectrumOpts s_o;
    auto* c_spec = app.add_subcommand("spectrum", "transition matrix spectrum against predictions");
    c_spec->add_option("--eps", s_o.eps, "noise level override");
    c_spec->add_option("--grid", s_o.grid, "matrix size")->capture_default_str();
    c_spec->add_option("--r-min", s_o.r_min, "prediction cutoff")->capture_default_str();
    c_spec->add_flag("--write-matrix", s_o.write_matrix, "also write matrix.bin");

    PredictOpts p_o;
    auto* c_pred = app.add_subcommand("predict", "limiting eigenvalues as eps -> 0");
    c_pred->add_option("--r-min", p_o.r_min, "modulus cutoff")->capture_default_str();
    c_pred->add_option("--max-period", p_o.max_period)->capture_default_str();

    McOpts m_o;
    auto* c_mc = app.add_subcommand("mc", "Monte Carlo passage times or phase chain");
    c_mc->add_option("--theta0", m_o.theta0, "start time")->capture_default_str();
    c_mc->add_option("--x0", m_o.x0, "start value (default h(theta0))");
    c_mc->add_option("--eps", m_o.eps, "noise level override");
    c_mc->add_option("--dt", m_o.dt, "time step")->capture_default_str()->check(CLI::PositiveNumber);
    c_mc->add_option("--trials", m_o.trials)->capture_default_str()->check(CLI::PositiveNumber);
    c_mc->add_flag("--no-bridge", m_o.no_bridge, "disable the bridge crossing correction");
    c_mc->add_flag("--samples", m_o.samples, "write samples.csv");
    c_mc->add_flag("--no-ks", m_o.no_ks, "skip the Volterra comparison");
    c_mc->add_option("--chain", m_o.chain, "sample this many firing phases instead");
    c_mc->add_option("--burn-in", m_o.burn_in)->capture_default_str();

    SweepOpts w_o;
    auto* c_sweep = app.add_subcommand("sweep", "locking period and multiplier over (I, k)");
    c_sweep->add_option("--gamma", w_o.gamma)->capture_default_str();
    c_sweep->add_option("--I-min", w_o.i_min)->capture_default_str();
    c_sweep->add_option("--I-max", w_o.i_max)->capture_default_str();
    c_sweep->add_option("--I-count", w_o.i_count)->capture_default_str();
    c_sweep->add_option("--k-min", w_o.k_min)->capture_default_str();
    c_sweep->add_option("--k-max", w_o.k_max)->capture_default_str();
    c_sweep->add_option("--k-count", w_o.k_count)->capture_default_str();
    c_sweep->add_option("--max-period", w_o.max_period)->capture_default_str();

    auto* c_example = app.add_subcommand("example", "check a preset against its reference values");

    std::string matrix_path;
    auto* c_eig = app.add_subcommand("eig", "eigenvalues of a binary matrix file");
    c_eig->add_option("matrix", matrix_path, "binary matrix")->required()->check(CLI::ExistingFile);

    std::string command = "sif";
    for (int i = 1; i < argc; ++i) command += std::string(" ") + argv[i];

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (app.exit(e) == 0) return 0;
        // parsing may stop before --out is consumed
        for (int i = 1; i < argc; ++i) {
            const std::string_view a = argv[i];
            if (a == "--out" && i + 1 < argc) g.out = argv[i + 1];
            else if (a.starts_with("--out=")) g.out = std::string(a.substr(6));
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(g, RunRecord{}, command, wall, static_cast<int>(ErrorClass::config), e.what());
        return static_cast<int>(ErrorClass::config);
    }
    if (ex_opt->count() > 0) g.example = example_id;
#ifdef _OPENMP
    if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

    RunRecord rec;
    int code = 0;
    std::string error;
    try {
        if (c_map->parsed()) {
            rec.subcommand = "analyze-map";
            cmd_analyze_map(g, map_o, rec);
        } else if (c_fptd->parsed()) {
            rec.subcommand = "fptd";
            cmd_fptd(g, f_o, rec);
        } else if (c_spec->parsed()) {
            rec.subcommand = "spectrum";
            cmd_spectrum(g, s_o, rec);
        } else if (c_pred->parsed()) {
            rec.subcommand = "predict";
            cmd_predict(g, p_o, rec);
        } else if (c_mc->parsed()) {
            rec.subcommand = "mc";
            cmd_mc(g, m_o, rec);
        } else if (c_sweep->parsed()) {
            rec.subcommand = "sweep";
            cmd_sweep(g, w_o, rec);
        } else if (c_example->parsed()) {
            rec.subcommand = "example";
            if (!cmd_example(g, rec)) {
                code = static_cast<int>(ErrorClass::condition);
                error = "reference values not reproduced";
            }
        } else if (c_eig->parsed()) {
            rec.subcommand = "eig";
            cmd_eig(g, matrix_path, rec);
        }
    } catch (const Error& e) {
        code = static_cast<int>(e.error_class());
        error = e.what();
        std::fprintf(stderr, "error: %s\n", e.what());
        const std::string hint = hint_for(e);
        if (!hint.empty()) std::fprintf(stderr, "hint: %s\n", hint.c_str());
    } catch (const fs::filesystem_error& e) {
        code = static_cast<int>(ErrorClass::config);
        error = e.what();
        std::fprintf(stderr, "error: %s\n", e.what());
    } catch (const std::exception& e) {
        code = static_cast<int>(ErrorClass::numerical);
        error = e.what();
        std::fprintf(stderr, "error: %s\n", e.what());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(g, rec, command, wall, code, error);
    return code;
}

} // namespace sif
