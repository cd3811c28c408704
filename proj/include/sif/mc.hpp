#pragma once

#include "sif/model.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace sif {

struct SimConfig {
    double dt = 1e-4;
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    /// Detect crossings between grid points with the Brownian-bridge probability.
    bool bridge_correction = true;
};

struct SampleSummary {
    double mean = 0.0;
    double stdev = 0.0;   ///< unbiased
    double skewness = 0.0;
    double kurtosis = 0.0; ///< excess
};

struct HitSample {
    std::vector<double> times; ///< index = trial
    double start_phase = 0.0;
    SampleSummary summary;
};

/// Horizon for a single passage, in periods past the start.
inline constexpr double max_passage_periods = 50.0;

/// Stream for one trial; depends only on (seed, stream).
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t stream);

/// One passage from (t0, x0) with the exact Gaussian transition per step.
/// Throws HorizonExceeded past 50 periods.
double simulate_passage(const SifModel& model, double t0, double x0, const SimConfig& cfg, std::mt19937_64& rng);

/// cfg.trials independent passages, OpenMP over trials. Bitwise identical to the
/// serial version for every thread count.
HitSample simulate_hit(const SifModel& model, double t0, double x0, const SimConfig& cfg);
HitSample simulate_hit_serial(const SifModel& model, double t0, double x0, const SimConfig& cfg);

/// Firing phases of one chain: start at theta0 with X = h(theta0), reset to h at
/// each firing. The first burn_in phases are dropped; returns `steps` phases.
std::vector<double> sample_phase_chain(const SifModel& model, double theta0, std::size_t steps, const SimConfig& cfg,
                                       std::size_t burn_in = 0);

/// Sum by recursive halving; the result does not depend on how values were produced.
double pairwise_sum(const double* v, std::size_t n);
SampleSummary summarize(const std::vector<double>& v);

/// sup |F_n - F| for the empirical distribution of `samples`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Normalized counts of phases in [0, 1) on `bins` equal cells.
std::vector<double> histogram(const std::vector<double>& phases, std::size_t bins);

/// Half the l1 distance of two probability vectors.
double total_variation(const std::vector<double>& a, const std::vector<double>& b);

} // namespace sif
