#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "wfgame/configuration.hpp"
#include "wfgame/kernel.hpp"

namespace wfgame {

/// 2x2 payoff matrix over the type space {1, 0}.
class PayoffMatrix {
public:
    PayoffMatrix(double p11, double p10, double p01, double p00)
        : p11_(p11), p10_(p10), p01_(p01), p00_(p00) {}

    // Donation game: benefit b to the partner, cost c to the donor.
    static PayoffMatrix donation(double b, double c) {
        PayoffMatrix m(b - c, -c, b, 0.0);
        m.donation_ = std::make_pair(b, c);
        return m;
    }

    static PayoffMatrix zero() { return PayoffMatrix(0.0, 0.0, 0.0, 0.0); }

    double operator()(int sigma, int tau) const {
        return sigma ? (tau ? p11_ : p10_) : (tau ? p01_ : p00_);
    }

    double max_abs() const;

    // (b, c) if constructed as a donation game
    const std::optional<std::pair<double, double>>& donation_params() const { return donation_; }

    // Entries with no interaction cross-term: p11 - p10 - p01 + p00 = 0.
    // Exactly this class has two-point first-order coefficients.
    bool is_additive(double tol = 1e-12) const {
        return std::abs(p11_ - p10_ - p01_ + p00_) <= tol;
    }

private:
    double p11_, p10_, p01_, p00_;
    std::optional<std::pair<double, double>> donation_;
};

// Largest admissible selection strength, (2 + 2 max|payoff|)^{-1}.
double max_selection(const PayoffMatrix& payoff);

/// Payoff matrix, selection strength and mutation rates for one game.
struct GameParams {
    PayoffMatrix payoff = PayoffMatrix::zero();
    double w = 0.0;
    double mu1 = 0.0; // rate of spontaneous 0 -> 1 flips per site
    double mu0 = 0.0; // rate of spontaneous 1 -> 0 flips per site

    void validate() const;
    double mu_total() const { return mu1 + mu0; }
};

// f^w(x, xi) = (1 - w) + w * sum_y q(x,y) payoff(xi(x), xi(y)); positive
// for all w <= max_selection.
double fitness(int x, const Configuration& config, const VotingKernel& kernel,
               const GameParams& params);

// Replacement distribution q^w(x, ., xi): q(x,y) f^w(y, xi) normalized over y.
Eigen::VectorXd game_kernel(int x, const Configuration& config, const VotingKernel& kernel,
                            const GameParams& params);

/// The functions entering the expansion q^w/q = 1 + w(A - B) + w^2 R^w.
struct PayoffFields {
    Eigen::VectorXd A;  // A(x) = 1 - two-step mean payoff seen from x
    Eigen::VectorXd B;  // B(y) = 1 - total payoff of y
    Eigen::MatrixXd Rw; // R^w(x,y) = A(A - B)/(1 - wA) on edges, 0 elsewhere
};

PayoffFields payoff_fields(const Configuration& config, const VotingKernel& kernel,
                           const PayoffMatrix& payoff, double w);

/// Density observables of one configuration.
struct Observables {
    double p1 = 0.0;              // pi-weighted density of ones
    std::vector<double> w_ell;    // W_1 .. W_max_ell
    double p11 = 0.0, p10 = 0.0, p01 = 0.0, p00 = 0.0; // edge-type densities
    // conditionals p_{tau|sigma} = p_{tau sigma}/p_sigma, 0/0 = 0
    double p1_given_1 = 0.0, p0_given_1 = 0.0, p1_given_0 = 0.0, p0_given_0 = 0.0;
};

Observables observables(const Configuration& config, const VotingKernel& kernel, int max_ell);

// W_ell alone: sum_{x,y} pi(x) q^ell(x,y) xi(x)(1 - xi(y)).
double w_ell(const Configuration& config, const VotingKernel& kernel, int ell);

// sum_{x,y} pi(x) q(x,y) [xi(y) - xi(x)] [A(x) - B(y)]; for donation payoffs
// equals b(W_3 - W_1) - c W_2.
double dbar(const Configuration& config, const VotingKernel& kernel, const PayoffMatrix& payoff);

// sum_{x,y} pi(x) q(x,y) [A(x) - B(y)]^2; for donation payoffs equals
// b^2(W_4 - W_2) - 2bc(W_3 - W_1) + c^2 W_2.
double dbar_second(const Configuration& config, const VotingKernel& kernel,
                   const PayoffMatrix& payoff);

} // namespace wfgame
