#pragma once

// Random ensembles, Monte Carlo orchestration and the fits applied to
// configuration-averaged profiles.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wgqed/greens.hpp"

namespace wgqed {

/// Any two of atoms, density and length fix the third through N = n a b L.
struct SamplingSpec {
    std::optional<std::size_t> atoms;
    std::optional<double> density;  // atoms per (1/k0)^3
    std::optional<double> length;   // cloud occupies -L/2 < z < L/2
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    std::vector<Vec3> fixed;        // pinned atoms, counted in N, placed first
};

struct ResolvedSampling {
    std::size_t atoms = 0;
    double density = 0.0;  // N / (a b L) after rounding N
    double length = 0.0;
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    std::vector<Vec3> fixed;
};

/// Throws ConfigError unless exactly two of {N, n, L} are given, or all three
/// satisfy N = n a b L to within rounding.
ResolvedSampling resolve_sampling(const SamplingSpec& spec, const Geometry& geometry);

/// Trial `trial` of the run: fixed atoms followed by N - fixed uniform draws in
/// (0,a) x (0,b) x (-L/2, L/2). Pure function of (seed, trial).
AtomEnsemble sample_configuration(const ResolvedSampling& spec, const Geometry& geometry,
                                  std::size_t trial);

struct Statistic {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials_used = 0;
};

Statistic summarize(std::span<const double> samples);

/// Per-trial observables. A trial that throws is excluded.
using TrialFunction = std::function<std::vector<double>(std::size_t trial)>;

struct TrialBatch {
    std::vector<std::vector<double>> results;  // indexed by trial; empty when failed
    std::vector<std::size_t> failed;
    std::vector<std::string> messages;         // one per failed trial

    std::size_t used() const { return results.size() - failed.size(); }
    /// Samples of observable k over successful trials, in trial order.
    std::vector<double> column(std::size_t k) const;
    std::vector<Statistic> statistics() const;
};

/// Largest tolerated share of failed trials.
inline constexpr double kMaxFailureFraction = 0.01;

/// Runs trials 0..count-1 on `threads` workers. The result does not depend on
/// the thread count. Throws NumericalError when more than 1% of trials fail.
TrialBatch run_trials(std::size_t count, unsigned threads, const TrialFunction& fn);

using Experiment = std::function<std::vector<double>(const AtomEnsemble&, std::size_t trial)>;

struct MonteCarloResult {
    std::vector<Statistic> observables;
    TrialBatch batch;
};

MonteCarloResult run_monte_carlo(const Experiment& experiment, const ResolvedSampling& spec,
                                 const Geometry& geometry, unsigned threads);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_error = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct ExtinctionFit {
    double alpha = 0.0;  // amplitude convention: |beta| ~ exp(-alpha z)
    double alpha_error = 0.0;
    LinearFit line;
    std::optional<std::string> warning;
};

/// Least squares on log(amplitude) over the central 60% of a cloud of length L.
/// Bins with non-finite or non-positive amplitude are skipped; needs 10 bins.
ExtinctionFit fit_extinction(std::span<const double> z, std::span<const double> amplitude,
                             double cloud_length);

struct LocalizationFit {
    bool localized = false;
    double xi = 0.0;  // 1/k0; infinite when not localized
    double xi_error = 0.0;
    LinearFit line;
    std::string note;
};

/// xi = -1/slope of the mean of log T against L. Needs 4 lengths spanning 3x.
LocalizationFit fit_localization_length(std::span<const double> lengths,
                                        std::span<const double> mean_log_t);

}  // namespace wgqed
