#include "sif/markov.hpp"

#include "sif/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>

namespace sif {

namespace {

void check_grid(const SifModel& model, std::size_t n)
{
    if (n < 1 || n > 1024) throw ConfigError("grid size must be in [1, 1024], got " + std::to_string(n));
    if (!(model.eps() > 0.0)) throw ConfigError("transition matrix needs eps > 0");
}

TransitionMatrix empty_matrix(const SifModel& model, std::size_t n)
{
    TransitionMatrix t;
    t.n = n;
    t.entries = DenseMatrix(n);
    t.grid_points.resize(n);
    t.row_mass_deficits.assign(n, 0.0);
    t.eps = model.eps();
    for (std::size_t i = 0; i < n; ++i) t.grid_points[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    return t;
}

void store_row(TransitionMatrix& t, std::size_t i, const std::vector<double>& row, double deficit)
{
    std::copy(row.begin(), row.end(), t.entries.data.begin() + static_cast<std::ptrdiff_t>(i * t.n));
    t.row_mass_deficits[i] = deficit;
}

} // namespace

std::vector<double> transition_row(const SifModel& model, std::size_t n, std::size_t row,
                                   const VolterraOptions& options, double& deficit)
{
    const double theta = (static_cast<double>(row) + 0.5) / static_cast<double>(n);
    const FptdGrid grid = solve_volterra(model, theta, model.reset()(theta), options);
    std::vector<double> mass = wrap_cell_masses(grid, static_cast<int>(n));
    double total = 0.0;
    for (double& v : mass) {
        v = std::max(v, 0.0);
        total += v;
    }
    deficit = 1.0 - total;
    if (!(total > 0.0)) throw mass_deficit("row " + std::to_string(row) + " carries no mass");
    for (double& v : mass) v /= total;
    return mass;
}

TransitionMatrix build_matrix_serial(const SifModel& model, std::size_t n, const VolterraOptions& options)
{
    check_grid(model, n);
    TransitionMatrix t = empty_matrix(model, n);
    for (std::size_t i = 0; i < n; ++i) {
        double deficit = 0.0;
        const auto row = transition_row(model, n, i, options, deficit);
        store_row(t, i, row, deficit);
    }
    return t;
}

TransitionMatrix build_matrix(const SifModel& model, std::size_t n, const VolterraOptions& options)
{
    check_grid(model, n);
    TransitionMatrix t = empty_matrix(model, n);
    std::vector<std::exception_ptr> errors(n);
    const auto rows = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < rows; ++i) {
        const auto r = static_cast<std::size_t>(i);
        try {
            double deficit = 0.0;
            const auto row = transition_row(model, n, r, options, deficit);
            store_row(t, r, row, deficit);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    // report the lowest failing row, independent of the schedule
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return t;
}

std::vector<double> stationary(const DenseMatrix& p)
{
    const std::size_t n = p.n;
    if (n == 0) throw ConfigError("empty matrix");
    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
    constexpr long cap = 100000;
    for (long it = 0; it < cap; ++it) {
        // next = pi (P + I) / 2
        for (std::size_t j = 0; j < n; ++j) next[j] = 0.5 * pi[j];
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 0.5 * pi[i];
            if (w == 0.0) continue;
            const double* row = p.data.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) next[j] += w * row[j];
        }
        double total = 0.0;
        for (double v : next) total += v;
        double tv = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            next[j] /= total;
            tv += std::abs(next[j] - pi[j]);
        }
        pi.swap(next);
        if (0.5 * tv < 1e-12) return pi;
    }
    throw no_convergence("stationary distribution did not settle in 1e5 lazy power iterations");
}

std::vector<EigenPair> match_eigenvalues(const std::vector<std::complex<double>>& computed,
                                         const LimitSpectrum& predicted)
{
    const std::size_t k = std::min(computed.size(), predicted.entries.size());
    std::vector<bool> used(k, false);
    std::vector<EigenPair> pairs;
    for (std::size_t p = 0; p < predicted.entries.size(); ++p) {
        std::size_t best = k;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (used[c]) continue;
            const double d = std::abs(computed[c] - predicted.entries[p].value);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (best == k) break;
        used[best] = true;
        pairs.push_back({p, best, best_d});
    }
    return pairs;
}

SpectrumReport spectrum(const DenseMatrix& matrix, const LimitSpectrum& predicted)
{
    Spectrum s = eigenvalues(matrix);
    SpectrumReport r;
    r.computed = std::move(s.values);
    sort_by_modulus(r.computed);
    r.iterations = s.iterations;
    r.predicted = predicted;
    r.pairs = match_eigenvalues(r.computed, predicted);
    r.n = matrix.n;
    return r;
}

SpectrumReport spectrum(const TransitionMatrix& matrix, const LimitSpectrum& predicted)
{
    SpectrumReport r = spectrum(matrix.entries, predicted);
    r.eps = matrix.eps;
    return r;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v)
{
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is)
{
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("truncated matrix file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

} // namespace

void write_matrix(const std::string& path, const DenseMatrix& m)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    put_u64(os, m.n);
    for (double v : m.data) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        put_u64(os, bits);
    }
    if (!os) throw ConfigError("write failed: " + path);
}

DenseMatrix read_matrix(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path);
    const std::uint64_t n = get_u64(is);
    if (n > 1024) throw ConfigError("matrix file " + path + " declares n = " + std::to_string(n) + " > 1024");
    DenseMatrix m(static_cast<std::size_t>(n));
    for (double& v : m.data) {
        const std::uint64_t bits = get_u64(is);
        std::memcpy(&v, &bits, sizeof v);
    }
    if (is.peek() != std::char_traits<char>::eof()) throw ConfigError("trailing bytes in matrix file " + path);
    return m;
}

} // namespace sif
