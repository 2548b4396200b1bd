#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wfgame/common.hpp"
#include "wfgame/game.hpp"
#include "wfgame/simulate.hpp"

namespace wfgame {

/// Parameters of the limiting diffusion
/// dY = [a Y(1-Y) + mu1 (1-Y) - mu0 Y] dt + sqrt(Y(1-Y)) dW.
struct WFParams {
    double a = 0.0;   // composite drift, w_infinity * K1(b, c)
    double mu1 = 0.0;
    double mu0 = 0.0;
    double y0 = 0.5;

    void validate() const;
};

// K1 = [b(R2 + R1) - c(R1 + R0)]/2 and
// K2 = [b^2(R3 + R2) - 2bc(R2 + R1) + c^2(R1 + R0)]/2 from return
// probabilities R = (R0, R1, R2, R3) with R0 = 1 and R1 = 0.
std::pair<double, double> k_constants(const std::vector<double>& r, double b, double c);

// Absorption probability at 1 of the drifted diffusion started at y0 with
// zero mutation: (1 - exp(-2 a y0)) / (1 - exp(-2a)), continuously extended
// by y0 at a = 0.
double fixation_probability(double a, double y0);

struct WFPath {
    std::vector<double> times;
    std::vector<double> values;
    std::optional<Absorption> absorption; // only when mu1 = mu0 = 0
    double final_value = 0.0;
};

// Euler-Maruyama with clamping to [0,1]; with zero mutation a clamped exact
// hit of 0 or 1 absorbs. record_stride > 1 keeps every stride-th point.
WFPath simulate_wf(const WFParams& params, double dt, double horizon, std::uint64_t seed,
                   int record_stride = 1);

/// Degree-k pair-approximation coefficients: drift
/// w (k-2)/(k^2(k-1)) p(1-p)(alpha p + beta) and squared noise
/// 2(k-2)/(N(k-1)) p(1-p).
struct PairApproxCoeffs {
    int k = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double drift(double p, int n, double w) const;
    double squared_noise(double p, int n) const;
};

PairApproxCoeffs pair_approx(int k, const PayoffMatrix& payoff);

// Applies the time change N(k-1)/(2(k-2)) and w = w_infinity/N to the
// pair-approximation coefficients for the donation game and returns the
// largest deviation, over p in {0, 0.01, .., 1}, from the limiting drift
// w_infinity (b - ck)/(2k) p(1-p) and squared noise p(1-p).
double pair_approx_equivalence_check(int k, double b, double c, int n, double w_infinity);

} // namespace wfgame
