#pragma once

#include "sif/detmap.hpp"
#include "sif/eigen.hpp"
#include "sif/fptd.hpp"
#include "sif/model.hpp"

#include <complex>
#include <string>
#include <vector>

namespace sif {

/// Row-stochastic discretization of the firing-phase transition operator.
struct TransitionMatrix {
    std::size_t n = 0;
    DenseMatrix entries;                  ///< row i: start phase grid_points[i]
    std::vector<double> grid_points;      ///< (i + 1/2) / n
    std::vector<double> row_mass_deficits; ///< 1 - row sum before normalization
    double eps = 0.0;
};

inline constexpr std::size_t default_grid = 200;

/// Row i solves the passage density from (theta_i, h(theta_i)), wraps it onto the
/// circle and integrates it over each cell. Rows run in parallel (OpenMP);
/// results do not depend on the schedule.
TransitionMatrix build_matrix(const SifModel& model, std::size_t n, const VolterraOptions& options = {});
/// Same rows computed one after another.
TransitionMatrix build_matrix_serial(const SifModel& model, std::size_t n, const VolterraOptions& options = {});

/// One normalized row and its pre-normalization deficit.
std::vector<double> transition_row(const SifModel& model, std::size_t n, std::size_t row,
                                   const VolterraOptions& options, double& deficit);

/// Stationary distribution by power iteration on the lazy chain (P + I) / 2, from
/// uniform, until successive iterates differ by < 1e-12 in total variation.
/// Throws NoConvergence after 1e5 iterations.
std::vector<double> stationary(const DenseMatrix& p);

struct EigenPair {
    std::size_t predicted = 0; ///< index into predicted.entries
    std::size_t computed = 0;  ///< index into computed
    double residual = 0.0;
};

struct SpectrumReport {
    std::vector<std::complex<double>> computed; ///< modulus descending
    LimitSpectrum predicted;
    std::vector<EigenPair> pairs;
    double eps = 0.0;
    std::size_t n = 0;
    long iterations = 0;
};

/// Full spectrum of the matrix, with the top |predicted| eigenvalues greedily
/// matched to predicted values in modulus-descending order.
SpectrumReport spectrum(const TransitionMatrix& matrix, const LimitSpectrum& predicted);
SpectrumReport spectrum(const DenseMatrix& matrix, const LimitSpectrum& predicted);

/// Greedy nearest-neighbour matching; each candidate is used at most once.
std::vector<EigenPair> match_eigenvalues(const std::vector<std::complex<double>>& computed,
                                         const LimitSpectrum& predicted);

/// Binary matrix file: uint64 n, then n*n float64, all little-endian, row-major.
void write_matrix(const std::string& path, const DenseMatrix& m);
DenseMatrix read_matrix(const std::string& path);

} // namespace sif
