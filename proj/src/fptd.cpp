#include "sif/fptd.hpp"

#include "sif/detmap.hpp"
#include "sif/error.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace sif {

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// u / sinh(u), accurate near zero.
double u_over_sinh(double u)
{
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + 7.0 * u2 * u2 / 360.0;
    }
    return u / std::sinh(u);
}

// u / tanh(u), accurate near zero.
double u_over_tanh(double u)
{
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 + u2 / 3.0 - u2 * u2 / 45.0;
    }
    return u / std::tanh(u);
}

void require_constant_input(const SifModel& model)
{
    if (!model.input().is_constant())
        throw ConfigError("slope term needs constant input; apply reduce_to_constant_input first");
}

} // namespace

double GaussianFptd::scaled_density(double u) const
{
    return inv_sqrt_2pi / sigma_tau * std::exp(-0.5 * u * u / (sigma_tau * sigma_tau));
}

double GaussianFptd::density(double t) const
{
    const double z = (t - mean) / stdev;
    return inv_sqrt_2pi / stdev * std::exp(-0.5 * z * z);
}

GaussianFptd gaussian_approx(const SifModel& model, double t0, double x0)
{
    GaussianFptd out;
    out.mean = hit_time(model, t0, x0);
    out.slope_gap = model.slope_margin(out.mean);
    if (!(out.slope_gap > 1e-10))
        throw non_transversal("slope gap m=" + std::to_string(out.slope_gap) + " at the crossing f=" +
                              std::to_string(out.mean));
    out.variance = model.variance_factor(out.mean - t0);
    out.sigma_tau = std::sqrt(out.variance) / out.slope_gap;
    out.stdev = model.eps() * out.sigma_tau;
    return out;
}

double transition_density_q(const SifModel& model, double t, double t0, double x0)
{
    const double var = model.eps() * model.eps() * model.variance_factor(t - t0);
    const double gap = model.threshold()(t) - model.flow(t, t0, x0);
    return inv_sqrt_2pi / std::sqrt(var) * std::exp(-0.5 * gap * gap / var);
}

double slope_b1(const SifModel& model, double t, double t0, double x0)
{
    require_constant_input(model);
    const double dt = t - t0;
    if (dt < 1e-14) throw degenerate_interval("t - t0 = " + std::to_string(dt));
    const double xi = model.flow(t, t0, x0);
    const double g = model.threshold()(t);
    // psi'(t | t0, t) = gamma coth(gamma dt), or 1/dt when gamma = 0
    const double psi_prime = u_over_tanh(model.gamma() * dt) / dt;
    return -model.threshold().derivative(t) - model.gamma() * xi + model.input().mean() + psi_prime * (g - xi);
}

double boundary_kernel_b1(const SifModel& model, double t, double r)
{
    require_constant_input(model);
    const double dt = t - r;
    if (dt < 1e-14) throw degenerate_interval("t - r = " + std::to_string(dt));
    const auto& g = model.threshold();
    const double gt = g(t);
    const double u = model.gamma() * dt;
    const double slope = (gt - g(r)) / dt;
    return (slope - g.derivative(t)) + (u_over_sinh(u) - 1.0) * slope +
           std::tanh(0.5 * u) * (model.gamma() * gt - model.input().mean());
}

double closed_form_bm(double B, double I, double t0, double x0, double eps, double t)
{
    if (!(x0 < B)) throw ConfigError("closed-form passage density needs x0 < B");
    if (!(eps > 0.0)) throw ConfigError("closed-form passage density needs eps > 0");
    if (t <= t0) return 0.0;
    const double dt = t - t0;
    const double z = B - x0 - I * dt;
    return (B - x0) / dt * inv_sqrt_2pi / (eps * std::sqrt(dt)) * std::exp(-z * z / (2.0 * eps * eps * dt));
}

// ---------------------------------------------------------------------------

double FptdGrid::density_at(double t) const
{
    if (t <= t0 || density.empty()) return 0.0;
    const double s = (t - t0) / step;
    const auto i = static_cast<std::size_t>(s);
    if (i + 1 >= density.size()) return i + 1 == density.size() && s == static_cast<double>(i) ? density.back() : 0.0;
    const double w = s - static_cast<double>(i);
    return density[i] + w * (density[i + 1] - density[i]);
}

double FptdGrid::cumulative_at(double t) const
{
    if (t <= t0 || density.empty()) return 0.0;
    const double s = (t - t0) / step;
    const auto i = static_cast<std::size_t>(s);
    if (i + 1 >= density.size()) return cumulative.back();
    const double w = s - static_cast<double>(i);
    return cumulative[i] + step * (w * density[i] + 0.5 * w * w * (density[i + 1] - density[i]));
}

constexpr double min_default_step = 1e-5;

double default_step(const SifModel& model, double t0, double x0)
{
    double sigma_tau = std::numeric_limits<double>::infinity();
    const double f = hit_time(model, t0, x0);
    const double fs = crossing_time(model, t0, x0);
    for (double c : {f, fs}) {
        const double m = model.slope_margin(c);
        if (m > 1e-10) sigma_tau = std::min(sigma_tau, std::sqrt(model.variance_factor(c - t0)) / m);
    }
    if (!std::isfinite(sigma_tau)) return 1e-3;
    return std::clamp(model.eps() * sigma_tau / 20.0, min_default_step, 1e-3);
}

namespace {

// 6-point Gauss-Legendre rule on [0, 1].
constexpr std::array<double, 6> gl_x{0.033765242898423989, 0.16939530676686775, 0.38069040695840156,
                                     0.61930959304159844, 0.83060469323313224, 0.96623475710157601};
constexpr std::array<double, 6> gl_w{0.085662246189585178, 0.18038078652406930, 0.23395696728634552,
                                     0.23395696728634552, 0.18038078652406930, 0.085662246189585178};

// Cubic Lagrange basis on the nodes s0..s0+width-1, evaluated at x.
std::array<double, 4> lagrange_basis(double x, std::size_t s0, std::size_t width)
{
    std::array<double, 4> out{};
    for (std::size_t a = 0; a < width; ++a) {
        double v = 1.0;
        for (std::size_t b = 0; b < width; ++b)
            if (b != a)
                v *= (x - static_cast<double>(s0 + b)) / (static_cast<double>(a) - static_cast<double>(b));
        out[a] = v;
    }
    return out;
}

// int_c^{c+1} sqrt(x) L_k(x) dx for the cubic through lags c-1..c+2; exact in s = sqrt(x).
std::array<double, 4> sqrt_cubic_cell(std::size_t c)
{
    std::array<double, 4> w{};
    const double sa = std::sqrt(static_cast<double>(c)), sb = std::sqrt(static_cast<double>(c + 1));
    for (std::size_t k = 0; k < gl_x.size(); ++k) {
        const double s = sa + (sb - sa) * gl_x[k];
        const auto L = lagrange_basis(s * s, c - 1, 4);
        for (std::size_t a = 0; a < 4; ++a) w[a] += gl_w[k] * (sb - sa) * 2.0 * s * s * L[a];
    }
    return w;
}

// Per-lag constants of the boundary kernel on a uniform grid.
struct Lag {
    double decay;     // e^{-gamma d h}
    double drift;     // xi(t | r, 0) for constant input
    double inv_2var;  // 1 / (2 eps^2 sigma^2(d h))
    double gscale;    // h^{3/2} / (sqrt(2 pi) eps sigma(d h) sqrt(d h))
    double u_sinh;    // u / sinh u
    double inv_dt;    // 1 / (d h)
    double tanh_half; // tanh(u / 2)
};

Lag make_lag(const SifModel& m, std::size_t d, double h)
{
    const double gam = m.gamma(), eps = m.eps(), I = m.input().mean();
    const double elapsed = static_cast<double>(d) * h;
    const double var = m.variance_factor(elapsed);
    const double u = gam * elapsed;
    Lag L;
    if (gam > 0.0) {
        L.decay = std::exp(-u);
        L.drift = -(I / gam) * std::expm1(-u);
    } else {
        L.decay = 1.0;
        L.drift = I * elapsed;
    }
    L.inv_2var = 1.0 / (2.0 * eps * eps * var);
    L.gscale = h * std::sqrt(h) * inv_sqrt_2pi / (eps * std::sqrt(var * elapsed));
    L.u_sinh = u_over_sinh(u);
    L.inv_dt = 1.0 / elapsed;
    L.tanh_half = std::tanh(0.5 * u);
    return L;
}

// Kernel b1(t|r,g(r)) q(t|r,g(r)) at an arbitrary lag, for the near-diagonal cells
// where the Gaussian factor varies within a step.
struct KernelEval {
    const SifModel& m;
    double gt, gpt, cgt;

    double operator()(double t, double delta) const
    {
        const double gam = m.gamma(), I = m.input().mean(), eps = m.eps();
        const double gr = m.threshold()(t - delta);
        const double u = gam * delta;
        const double xi = gam > 0.0 ? std::exp(-u) * gr - (I / gam) * std::expm1(-u) : gr + I * delta;
        const double var = m.variance_factor(delta);
        const double gap = gt - xi;
        const double q = inv_sqrt_2pi / (eps * std::sqrt(var)) * std::exp(-gap * gap / (2.0 * eps * eps * var));
        const double b1 = u_over_sinh(u) * (gt - gr) / delta - gpt + std::tanh(0.5 * u) * cgt;
        return b1 * q;
    }
};

// Lag-only parts of the kernel at one Gauss point of a near-diagonal cell.
struct FineNode {
    double delta;
    double weight; // Gauss weight times d(delta) / ds
    double decay, drift, inv_2var, norm, u_sinh, inv_delta, tanh_half;
    std::array<double, 4> basis; // cubic basis on lags c-1..c+2 (c = 0: 0..3)
};

std::array<FineNode, 6> make_fine_cell(const SifModel& m, std::size_t c, double h)
{
    const double gam = m.gamma(), I = m.input().mean(), eps = m.eps();
    const double sa = std::sqrt(static_cast<double>(c) * h);
    const double sb = std::sqrt(static_cast<double>(c + 1) * h);
    std::array<FineNode, 6> out{};
    for (std::size_t k = 0; k < gl_x.size(); ++k) {
        FineNode& n = out[k];
        const double s = sa + (sb - sa) * gl_x[k];
        n.delta = s * s;
        n.weight = gl_w[k] * (sb - sa) * 2.0 * s;
        const double u = gam * n.delta;
        n.decay = std::exp(-u);
        n.drift = gam > 0.0 ? -(I / gam) * std::expm1(-u) : I * n.delta;
        const double var = m.variance_factor(n.delta);
        n.inv_2var = 1.0 / (2.0 * eps * eps * var);
        n.norm = inv_sqrt_2pi / (eps * std::sqrt(var));
        n.u_sinh = u_over_sinh(u);
        n.inv_delta = 1.0 / n.delta;
        n.tanh_half = std::tanh(0.5 * u);
        n.basis = lagrange_basis(n.delta / h, c > 0 ? c - 1 : 0, 4);
    }
    return out;
}


// Scheme: the kernel behaves like sqrt(t - r) times a smooth factor G. Within
// a few steps of the diagonal, int sqrt(delta) G p is integrated with product
// weights exact for a cubic interpolant of G p, and where G decays within a step
// the kernel is evaluated at Gauss points (in sqrt(delta)) and only p is
// interpolated. Beyond that the integrand is smooth and the trapezoid rule, with
// Gregory end corrections at the junction, keeps its high accuracy on the narrow
// peaks of p. p vanishes to all orders at t0, so no correction is needed there.
FptdGrid solve_at_step(const SifModel& model, double t0, double x0, const VolterraOptions& opt)
{
    if (!(model.eps() > 0.0)) throw ConfigError("Volterra passage density needs eps > 0");
    if (!mean_threshold_gap(model).holds)
        throw ConditionError("ConditionA", "mean trajectory never reaches the threshold; passage not certain");
    const ReducedModel red = reduce_to_constant_input(model);
    const SifModel& m = red.model;
    const double y0 = x0 - red.shift(t0);
    if (!(y0 < m.threshold()(t0))) throw ConfigError("start value must lie below the threshold");

    const double h = *opt.step;

    const double gam = m.gamma(), I = m.input().mean(), eps = m.eps();
    const auto& thr = m.threshold();
    constexpr std::size_t max_fine_cells = 64;
    constexpr std::size_t near_cells = 16;
    constexpr std::array<double, 3> gregory{3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    const double h32 = h * std::sqrt(h);

    FptdGrid out;
    out.t0 = t0;
    out.x0 = x0;
    out.step = h;
    std::vector<double>& p = out.density;
    std::vector<double>& C = out.cumulative;
    std::vector<double> g{thr(t0)};
    std::vector<Lag> lags{Lag{}};
    std::vector<double> sqrt_lag{0.0};
    std::vector<std::array<double, 4>> cells{{}}; // cubic cell weights, index c >= 1
    std::vector<double> fine_w;
    std::vector<std::array<FineNode, 6>> fine_nodes;
    p.push_back(0.0);
    C.push_back(0.0);

    auto cell = [&](std::size_t c) -> const std::array<double, 4>& {
        while (cells.size() <= c) cells.push_back(sqrt_cubic_cell(cells.size()));
        return cells[c];
    };
    // weight of the node at lag d from cubic cells first..last; cell c gives node c-1+k weight k
    auto cubic_weight = [&](std::size_t d, std::size_t first, std::size_t last) {
        double w = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            if (d + 1 < k) break;
            const std::size_t c = d + 1 - k;
            if (c >= first && c <= last) w += cell(c)[k];
        }
        return w;
    };

    double pmax = 0.0;
    double last_mass = 0.0;
    for (int period = 1;; ++period) {
        const auto end = static_cast<std::size_t>(std::ceil(period / h - 1e-9));
        for (std::size_t i = p.size(); i <= end; ++i) {
            const double t = t0 + static_cast<double>(i) * h;
            g.push_back(thr(t));
            lags.push_back(make_lag(m, i, h));
            sqrt_lag.push_back(std::sqrt(static_cast<double>(i)));

            const double gi = g[i], gpi = thr.derivative(t), cgi = gam * gi - I;
            // G at lag d in units where the cell weights are exact (times h^{3/2})
            auto smooth_factor = [&](std::size_t d) {
                const Lag& L = lags[d];
                const std::size_t j = i - d;
                const double gap = gi - (L.decay * g[j] + L.drift);
                const double ex = gap * gap * L.inv_2var;
                if (ex > 700.0) return 0.0;
                const double b1 = L.u_sinh * (gi - g[j]) * L.inv_dt - gpi + L.tanh_half * cgi;
                return b1 * L.gscale * std::exp(-ex);
            };

            // Gauss cells: enough to cover the decay length of the Gaussian factor,
            // between 2 and max_fine_cells. Near grazing the slope gap vanishes and
            // the estimate is useless, so the cap is the common case there.
            const double margin = gpi - cgi; // minus the slope gap of the reduced model
            const double decay_len = 2.0 * eps * eps / std::max(margin * margin, 1e-300);
            std::size_t fine = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::min(1e9, std::ceil(25.0 * decay_len / h))) + 1, 2, max_fine_cells);
            fine = std::min(fine, i);
            const std::size_t near_end = std::min(std::max(fine, near_cells), i);

            const KernelEval K{m, gi, gpi, cgi};
            const std::size_t width = std::min<std::size_t>(4, i + 1);
            fine_w.assign(std::min(fine + 2, i + 1), 0.0);
            const double panel_len = 0.5 * std::sqrt(decay_len);
            for (std::size_t c = 0; c < fine; ++c) {
                const double sa = std::sqrt(static_cast<double>(c) * h);
                const double sb = std::sqrt(static_cast<double>(c + 1) * h);
                const auto panels = static_cast<int>(std::min(64.0, std::ceil((sb - sa) / panel_len)));
                const std::size_t s0 = std::min(c > 0 ? c - 1 : 0, i + 1 - width);
                if (panels == 1 && width == 4 && s0 == (c > 0 ? c - 1 : 0)) {
                    while (fine_nodes.size() <= c) fine_nodes.push_back(make_fine_cell(m, fine_nodes.size(), h));
                    for (const FineNode& n : fine_nodes[c]) {
                        const double gr = thr(t - n.delta);
                        const double gap = gi - (n.decay * gr + n.drift);
                        const double b1 = n.u_sinh * (gi - gr) * n.inv_delta - gpi + n.tanh_half * cgi;
                        const double w = n.weight * b1 * n.norm * std::exp(-gap * gap * n.inv_2var);
                        for (std::size_t a = 0; a < 4; ++a) fine_w[s0 + a] += w * n.basis[a];
                    }
                    continue;
                }
                const double ps = (sb - sa) / panels;
                for (int pn = 0; pn < panels; ++pn) {
                    for (std::size_t k = 0; k < gl_x.size(); ++k) {
                        const double s = sa + ps * (pn + gl_x[k]);
                        const double delta = s * s;
                        const double w = gl_w[k] * ps * 2.0 * s * K(t, delta);
                        const auto L = lagrange_basis(delta / h, s0, width);
                        for (std::size_t a = 0; a < width; ++a) fine_w[s0 + a] += w * L[a];
                    }
                }
            }
            double diag = fine_w[0];
            double acc = 0.0;
            for (std::size_t d = 1; d < fine_w.size(); ++d) acc += fine_w[d] * p[i - d];

            // cubic cells fine..near_end-1 touch lags fine-1 .. near_end+1
            if (fine < near_end) {
                for (std::size_t d = fine - 1; d <= std::min(near_end + 1, i - 1); ++d) {
                    const double w = cubic_weight(d, fine, near_end - 1);
                    if (d == 0)
                        diag += w * h32 * inv_sqrt_2pi / eps * (-0.5 * thr.second_derivative(t) + 0.5 * gam * cgi);
                    else
                        acc += w * smooth_factor(d) * p[i - d];
                }
            }
            // trapezoid from lag near_end on
            const double cutoff = 1e-17 * pmax;
            for (std::size_t d = near_end; d < i; ++d) {
                const double pj = p[i - d];
                if (std::abs(pj) <= cutoff) continue;
                const std::size_t off = d - near_end;
                const double w = off < gregory.size() ? gregory[off] : 1.0;
                acc += w * sqrt_lag[d] * smooth_factor(d) * pj;
            }

            const double source = slope_b1(m, t, t0, y0) * transition_density_q(m, t, t0, y0);
            double pi = (source - acc) / (1.0 + diag);
            if (pi < 0.0) {
                out.clamped_mass += -pi * h;
                ++out.clamped_count;
                pi = 0.0;
            }
            pmax = std::max(pmax, pi);
            p.push_back(pi);
            C.push_back(C.back() + 0.5 * h * (p[i - 1] + pi));
        }
        if (out.clamped_mass > opt.clamp_abort)
            throw NumericalError("NegativeDensity", "quadrature produced negative density mass " +
                                                        detail::short_num(out.clamped_mass));
        out.horizon = t0 + static_cast<double>(p.size() - 1) * h;
        out.mass_deficit = 1.0 - C.back();
        const bool long_enough = out.horizon - t0 >= opt.min_horizon;
        if (long_enough && std::abs(out.mass_deficit) < opt.mass_tolerance) break;
        // once the density has died out further periods add nothing
        const bool stalled = C.back() > 0.5 && C.back() - last_mass < 1e-14;
        last_mass = C.back();
        if (period >= opt.max_periods || stalled) {
            if (std::abs(out.mass_deficit) > opt.failure_deficit)
                throw mass_deficit("mass deficit " + detail::short_num(out.mass_deficit) + " after " +
                                   std::to_string(period) + " periods");
            break;
        }
    }
    return out;
}

} // namespace

FptdGrid solve_volterra(const SifModel& model, double t0, double x0, const VolterraOptions& opt)
{
    if (opt.step) {
        if (!(*opt.step > 0.0) || !std::isfinite(*opt.step)) throw ConfigError("Volterra step must be positive");
        return solve_at_step(model, t0, x0, opt);
    }
    // near-tangent crossings can be sharper than sigma_tau suggests; refine until clean
    VolterraOptions o = opt;
    o.step = default_step(model, t0, x0);
    for (;;) {
        try {
            return solve_at_step(model, t0, x0, o);
        } catch (const NumericalError& e) {
            if (e.code() != "NegativeDensity" || *o.step <= min_default_step) throw;
            o.step = std::max(*o.step / 2.0, min_default_step);
        }
    }
}

std::vector<double> wrap_cell_masses(const FptdGrid& grid, int cells)
{
    if (cells < 1) throw ConfigError("circle grid needs at least one cell");
    std::vector<double> mass(static_cast<std::size_t>(cells), 0.0);
    const double n = cells;
    auto k = static_cast<long>(std::floor(grid.t0 * n));
    double lo = grid.t0;
    double c_lo = 0.0;
    while (lo < grid.horizon) {
        const double hi = std::min(grid.horizon, static_cast<double>(k + 1) / n);
        const double c_hi = grid.cumulative_at(hi);
        const long cell = ((k % cells) + cells) % cells;
        mass[static_cast<std::size_t>(cell)] += c_hi - c_lo;
        lo = hi;
        c_lo = c_hi;
        ++k;
    }
    return mass;
}

std::vector<double> wrap_density(const FptdGrid& grid, int cells)
{
    auto d = wrap_cell_masses(grid, cells);
    for (double& v : d) v *= cells;
    return d;
}

} // namespace sif
