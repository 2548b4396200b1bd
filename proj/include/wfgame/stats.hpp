#pragma once

#include <optional>
#include <vector>

#include "wfgame/common.hpp"
#include "wfgame/simulate.hpp"

namespace wfgame {

/// Moments and interval summary of a (possibly weighted) replica ensemble.
struct EnsembleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double ess = 0.0; // (sum w)^2 / sum w^2; equals n for equal weights
};

// Unweighted: sample mean and standard error, with a Wilson 95% interval
// when the values are all {0,1} (mean +- 1.96 se otherwise).
// Weighted: self-normalized importance-sampling mean with the delta-method
// standard error.
EnsembleSummary summarize(const std::vector<double>& values,
                          const std::optional<std::vector<double>>& weights = std::nullopt);

// Order-1 Wasserstein distance between the empirical measures of two
// nonempty sample sets, computed as the integral of |F_a - F_b|.
double wasserstein1(std::vector<double> samples_a, std::vector<double> samples_b);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double two_sample_ks(std::vector<double> samples_a, std::vector<double> samples_b);

/// A function on [0,1] tabulated on a uniform grid, evaluated by linear
/// interpolation.
struct TabulatedFn {
    std::vector<double> values; // values[i] at i/(size-1); at least 2 entries

    static TabulatedFn identity(int points = 101);
    static TabulatedFn constant(double c);
    double operator()(double y) const;
};

// integral of f(Y_t) dt over the piecewise-constant sampled path, truncated
// at absorption when recorded.
double occupation_integral(const TrajectoryRecord& traj, const TabulatedFn& f);

} // namespace wfgame
