#include "wfgame/game.hpp"

#include <cmath>

namespace wfgame {

double PayoffMatrix::max_abs() const {
    return std::max(std::max(std::abs(p11_), std::abs(p10_)),
                    std::max(std::abs(p01_), std::abs(p00_)));
}

double max_selection(const PayoffMatrix& payoff) {
    return 1.0 / (2.0 + 2.0 * payoff.max_abs());
}

void GameParams::validate() const {
    if (w < 0.0 || w > max_selection(payoff)) {
        throw InvalidInput("selection strength w=" + std::to_string(w) +
                           " outside [0, 1/(2+2*max|payoff|)] = [0, " +
                           std::to_string(max_selection(payoff)) + "]");
    }
    if (mu1 < 0.0 || mu0 < 0.0) throw InvalidInput("mutation rates must be nonnegative");
}

namespace {

// sum_y q(x,y) payoff(xi(x), xi(y)), the total payoff of the site x
double site_payoff(int x, const Configuration& config, const VotingKernel& kernel,
                   const PayoffMatrix& payoff) {
    const int sx = config.get(x);
    double acc = 0.0;
    for (int y : kernel.neighbors(x)) {
        acc += kernel.q()(x, y) * payoff(sx, config.get(y));
    }
    return acc;
}

} // namespace

double fitness(int x, const Configuration& config, const VotingKernel& kernel,
               const GameParams& params) {
    params.validate();
    return (1.0 - params.w) + params.w * site_payoff(x, config, kernel, params.payoff);
}

Eigen::VectorXd game_kernel(int x, const Configuration& config, const VotingKernel& kernel,
                            const GameParams& params) {
    params.validate();
    const int n = kernel.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    double total = 0.0;
    for (int y : kernel.neighbors(x)) {
        double f = (1.0 - params.w) + params.w * site_payoff(y, config, kernel, params.payoff);
        out(y) = kernel.q()(x, y) * f;
        total += out(y);
    }
    out /= total;
    return out;
}

PayoffFields payoff_fields(const Configuration& config, const VotingKernel& kernel,
                           const PayoffMatrix& payoff, double w) {
    if (w < 0.0 || w > max_selection(payoff)) {
        throw InvalidInput("payoff fields: selection strength out of range");
    }
    const int n = kernel.size();
    PayoffFields out;
    out.B.resize(n);
    for (int y = 0; y < n; ++y) out.B(y) = 1.0 - site_payoff(y, config, kernel, payoff);
    // A(x) = sum_z q(x,z) B(z): the one-step average of B
    out.A = kernel.q() * out.B;
    out.Rw = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        double denom = 1.0 - w * out.A(x);
        if (denom <= 0.0) throw SimulationError("payoff fields: expansion singular (1 - wA <= 0)");
        for (int y : kernel.neighbors(x)) {
            out.Rw(x, y) = out.A(x) * (out.A(x) - out.B(y)) / denom;
        }
    }
    return out;
}

double w_ell(const Configuration& config, const VotingKernel& kernel, int ell) {
    if (ell < 1) throw InvalidInput("w_ell: ell must be >= 1");
    const int n = kernel.size();
    Eigen::VectorXd zero_mask(n); // 1 - xi
    for (int x = 0; x < n; ++x) zero_mask(x) = config.get(x) ? 0.0 : 1.0;
    Eigen::VectorXd v = zero_mask;
    for (int step = 0; step < ell; ++step) v = kernel.q() * v; // v = q^ell (1 - xi)
    double acc = 0.0;
    for (int x = 0; x < n; ++x) {
        if (config.get(x)) acc += kernel.pi()(x) * v(x);
    }
    return acc;
}

Observables observables(const Configuration& config, const VotingKernel& kernel, int max_ell) {
    if (max_ell < 1) throw InvalidInput("observables: max_ell must be >= 1");
    const int n = kernel.size();
    Observables out;
    Eigen::VectorXd xi(n), hat(n), pix(n);
    for (int x = 0; x < n; ++x) {
        xi(x) = config.get(x);
        hat(x) = 1.0 - xi(x);
        pix(x) = kernel.pi()(x) * xi(x);
        out.p1 += pix(x);
    }
    Eigen::VectorXd v = hat;
    for (int ell = 1; ell <= max_ell; ++ell) {
        v = kernel.q() * v;
        out.w_ell.push_back(pix.dot(v));
    }
    Eigen::VectorXd q_xi = kernel.q() * xi;   // (q xi)(x)
    double p0 = 0.0;
    for (int x = 0; x < n; ++x) {
        double p = kernel.pi()(x);
        if (config.get(x)) {
            out.p11 += p * q_xi(x);
            out.p10 += p * (1.0 - q_xi(x));
        } else {
            p0 += p;
            out.p01 += p * q_xi(x);
            out.p00 += p * (1.0 - q_xi(x));
        }
    }
    const double p1 = out.p1;
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    // p_{tau|sigma} conditions on the type sigma at the second site
    out.p1_given_1 = ratio(out.p11, p1);
    out.p0_given_1 = ratio(out.p01, p1);
    out.p1_given_0 = ratio(out.p10, p0);
    out.p0_given_0 = ratio(out.p00, p0);
    return out;
}

double dbar(const Configuration& config, const VotingKernel& kernel, const PayoffMatrix& payoff) {
    PayoffFields f = payoff_fields(config, kernel, payoff, 0.0);
    const int n = kernel.size();
    double acc = 0.0;
    for (int x = 0; x < n; ++x) {
        double xi_x = config.get(x);
        for (int y : kernel.neighbors(x)) {
            acc += kernel.pi()(x) * kernel.q()(x, y) * (config.get(y) - xi_x) * (f.A(x) - f.B(y));
        }
    }
    return acc;
}

double dbar_second(const Configuration& config, const VotingKernel& kernel,
                   const PayoffMatrix& payoff) {
    PayoffFields f = payoff_fields(config, kernel, payoff, 0.0);
    const int n = kernel.size();
    double acc = 0.0;
    for (int x = 0; x < n; ++x) {
        for (int y : kernel.neighbors(x)) {
            double d = f.A(x) - f.B(y);
            acc += kernel.pi()(x) * kernel.q()(x, y) * d * d;
        }
    }
    return acc;
}

} // namespace wfgame
