#include "wfgame/diffusion.hpp"

#include <cmath>

#include "wfgame/rng.hpp"

namespace wfgame {

void WFParams::validate() const {
    if (y0 < 0.0 || y0 > 1.0) throw InvalidInput("wright-fisher params: y0 outside [0,1]");
    if (mu1 < 0.0 || mu0 < 0.0) throw InvalidInput("wright-fisher params: negative mutation rate");
}

std::pair<double, double> k_constants(const std::vector<double>& r, double b, double c) {
    if (r.size() < 4) throw InvalidInput("k constants: need return probabilities R_0..R_3");
    if (std::abs(r[0] - 1.0) > 1e-12 || std::abs(r[1]) > 1e-12) {
        throw InvalidInput("k constants: return probabilities must start with R_0 = 1, R_1 = 0");
    }
    for (double v : r) {
        if (v < -1e-12 || v > 1.0 + 1e-12) throw InvalidInput("k constants: R_ell outside [0,1]");
    }
    double k1 = (b * (r[2] + r[1]) - c * (r[1] + r[0])) / 2.0;
    double k2 = (b * b * (r[3] + r[2]) - 2.0 * b * c * (r[2] + r[1]) + c * c * (r[1] + r[0])) / 2.0;
    return {k1, k2};
}

double fixation_probability(double a, double y0) {
    if (y0 < 0.0 || y0 > 1.0) throw InvalidInput("fixation probability: y0 outside [0,1]");
    if (a == 0.0) return y0;
    // expm1 keeps the ratio accurate down to |a| ~ 1e-300
    return std::expm1(-2.0 * a * y0) / std::expm1(-2.0 * a);
}

WFPath simulate_wf(const WFParams& params, double dt, double horizon, std::uint64_t seed,
                   int record_stride) {
    params.validate();
    if (dt <= 0.0) throw InvalidInput("wright-fisher simulation: need dt > 0");
    if (record_stride < 1) throw InvalidInput("wright-fisher simulation: need record_stride >= 1");
    const bool mutating = params.mu1 > 0.0 || params.mu0 > 0.0;

    Rng rng(seed);
    WFPath path;
    double y = params.y0;
    double t = 0.0;
    path.times.push_back(0.0);
    path.values.push_back(y);
    const double sqrt_dt = std::sqrt(dt);

    if (!mutating && (y == 0.0 || y == 1.0)) {
        path.absorption = Absorption{y == 1.0 ? 1 : 0, 0.0};
        path.final_value = y;
        return path;
    }

    long step = 0;
    while (t < horizon) {
        double drift = params.a * y * (1.0 - y) + params.mu1 * (1.0 - y) - params.mu0 * y;
        double noise = std::sqrt(std::max(0.0, y * (1.0 - y)));
        y += drift * dt + noise * sqrt_dt * rng.normal();
        y = std::min(1.0, std::max(0.0, y));
        t += dt;
        ++step;
        bool absorbed = !mutating && (y == 0.0 || y == 1.0);
        if (step % record_stride == 0 || absorbed || t >= horizon) {
            path.times.push_back(t);
            path.values.push_back(y);
        }
        if (absorbed) {
            path.absorption = Absorption{y == 1.0 ? 1 : 0, t};
            break;
        }
    }
    path.final_value = y;
    return path;
}

double PairApproxCoeffs::drift(double p, int n, double w) const {
    (void)n;
    return w * (k - 2.0) / (static_cast<double>(k) * k * (k - 1.0)) * p * (1.0 - p) *
           (alpha * p + beta);
}

double PairApproxCoeffs::squared_noise(double p, int n) const {
    return 2.0 * (k - 2.0) / (n * (k - 1.0)) * p * (1.0 - p);
}

PairApproxCoeffs pair_approx(int k, const PayoffMatrix& payoff) {
    if (k < 3) throw InvalidInput("pair approximation: needs degree k >= 3");
    PairApproxCoeffs out;
    out.k = k;
    const double p11 = payoff(1, 1), p10 = payoff(1, 0), p01 = payoff(0, 1), p00 = payoff(0, 0);
    out.alpha = (k + 1.0) * (k - 2.0) * (p11 - p10 - p01 + p00);
    out.beta = (k + 1.0) * p11 + (static_cast<double>(k) * k - k - 1.0) * p10 - p01 -
               (static_cast<double>(k) * k - 1.0) * p00;
    return out;
}

double pair_approx_equivalence_check(int k, double b, double c, int n, double w_infinity) {
    if (n <= k) throw InvalidInput("pair approximation: needs n > k");
    PairApproxCoeffs coeffs = pair_approx(k, PayoffMatrix::donation(b, c));
    const double time_change = n * (k - 1.0) / (2.0 * (k - 2.0));
    const double w = w_infinity / n;
    double max_residual = 0.0;
    for (int i = 0; i <= 100; ++i) {
        double p = i / 100.0;
        double drift = time_change * coeffs.drift(p, n, w);
        double noise2 = time_change * coeffs.squared_noise(p, n);
        double limit_drift = w_infinity * (b - c * k) / (2.0 * k) * p * (1.0 - p);
        double limit_noise2 = p * (1.0 - p);
        max_residual = std::max(max_residual, std::abs(drift - limit_drift));
        max_residual = std::max(max_residual, std::abs(noise2 - limit_noise2));
    }
    return max_residual;
}

} // namespace wfgame
