#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wfgame/configuration.hpp"
#include "wfgame/game.hpp"
#include "wfgame/kernel.hpp"
#include "wfgame/rng.hpp"

namespace wfgame {

/// Partition state of a system of coalescing chains. Blocks never share a
/// site; blocks merge the instant one lands on an occupied site.
struct CoalescentState {
    std::vector<std::vector<int>> blocks; // original labels per block
    std::vector<int> block_sites;         // current site of each block
    double time = 0.0;
};

struct CoalescingRun {
    CoalescentState final_state;
    // c_times[k] = first time at most k+1 blocks remain (so c_times[0] is
    // the full coalescence time); entries stay infinite if not reached
    // before the horizon.
    std::vector<double> c_times;
    std::vector<CoalescentState> snapshots; // at the requested sample times
};

// Coalescing q-chains started from `start_sites` (duplicates merge at time
// zero); each block jumps at rate 1.
CoalescingRun simulate_coalescing(const VotingKernel& kernel, const std::vector<int>& start_sites,
                                  double horizon, std::uint64_t seed,
                                  const std::vector<double>& sample_times = {});
CoalescingRun simulate_coalescing(const VotingKernel& kernel, const std::vector<int>& start_sites,
                                  double horizon, Rng& rng,
                                  const std::vector<double>& sample_times = {});

/// Expected pairwise meeting times E[M_{x,y}] of two independent rate-1
/// q-chains: symmetric, zero diagonal, positive elsewhere.
struct MeetingTable {
    Eigen::MatrixXd m;
    double max_residual = 0.0; // of the defining linear system
};

// Solves 2 m(x,y) - sum_z q(x,z) m(z,y) - sum_z q(y,z) m(x,z) = 1 for
// x != y with m(x,x) = 0, by conjugate gradients in the pi(x)pi(y) inner
// product; residual below 1e-12.
MeetingTable meeting_times_exact(const VotingKernel& kernel);

// Solves the same absorbed-pair system with a general source h(x,y):
// F(x,y) = E[ integral_0^M_{x,y} h(pair position at s) ds ].
Eigen::MatrixXd pair_occupation_solve(const VotingKernel& kernel, const Eigen::MatrixXd& h);

// pi x pi average of the meeting table: the diffusion time scale.
double gamma_timescale(const VotingKernel& kernel, const MeetingTable& table);
double gamma_timescale(const VotingKernel& kernel);

/// Both sides of the stationary meeting-time identity
/// sum_{x,y} pi(x)^2 q(x,y) E[M_{x,y}] = (1 - sum_x pi(x)^2)/2.
struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

IdentityCheck meeting_identity_check(const VotingKernel& kernel, const MeetingTable& table);

/// Green function of the independent pair chain absorbed on the diagonal:
/// g[(x,y)][(u,v)] = expected time spent at (u,v) before the chains meet,
/// started from (x,y). Indexed over ordered off-diagonal pairs.
struct PairGreen {
    int n = 0;
    Eigen::MatrixXd g;               // size d x d with d = n(n-1)
    std::vector<std::pair<int, int>> pairs; // state order
    int index(int x, int y) const;   // position of the ordered pair (x,y)
};

// Dense solve over all n(n-1) ordered pairs; practical for modest n.
PairGreen pair_green(const VotingKernel& kernel);

/// Initial law for the exact first-order coefficient.
class InitialLaw {
public:
    static InitialLaw point(Configuration config);
    static InitialLaw uniform_ones(int m); // uniform over configurations with m ones
    static InitialLaw product(double density);
    static InitialLaw product(Eigen::VectorXd densities);

    // E[xi(u)(1 - xi(v))] for u != v under this law on n sites
    Eigen::MatrixXd cross_moments(int n) const;

    double mean_density(const VotingKernel& kernel) const; // E[p1(xi_0)]

private:
    InitialLaw() = default;
    enum class Kind { Point, UniformOnes, Product } kind_ = Kind::Product;
    std::optional<Configuration> config_;
    int m_ = 0;
    Eigen::VectorXd densities_;
    double constant_density_ = 0.0;
    bool constant_ = false;
};

// Exact E[ integral_0^infty Dbar(xi_s) ds ] under neutral dynamics via
// moment duality and the pair occupation solver. Requires a payoff matrix
// with no interaction cross-term (the donation family qualifies).
double first_order_coefficient(const VotingKernel& kernel, const PayoffMatrix& payoff,
                               const InitialLaw& initial);

// Closed-form value of the same coefficient on a simple k-regular graph
// under the donation game, started from m uniformly placed ones:
// m(n-m)/(2n(n-1)) * [b(n-2k) - ck(n-2)].
double first_order_regular_closed_form(int n, int k, double b, double c, int m);

/// Monte Carlo comparison of two estimators of the same quantity.
struct DualityCheck {
    double voter_estimate = 0.0;
    double voter_se = 0.0;
    double dual_estimate = 0.0;
    double dual_se = 0.0;
    double z_score = 0.0;
};

// E_xi[prod_{x in A} xi_t(x)]: voter simulation against coalescing chains.
DualityCheck duality_check_moment(const VotingKernel& kernel, const Configuration& initial,
                                  const std::vector<int>& sites, double t, std::size_t replicas,
                                  std::uint64_t seed, int threads = 0);

// E_xi[H(xi_t; x, y)] with H(xi;x,y) = [xi(x) - mu1/mu][1 - xi(y) - mu0/mu]:
// voter-with-mutation simulation against the weighted two-particle dual
// (the coalescing pair carries the factor exp(-mu * integral |pair| ds) and
// a diagonal correction term).
DualityCheck duality_check_fk(const VotingKernel& kernel, double mu1, double mu0,
                              const Configuration& initial, int x, int y, double t,
                              std::size_t replicas, std::uint64_t seed, int threads = 0);

/// Rescaled coalescence times from all-sites starts with their limiting
/// reference statistics.
struct CoalescentSpectrum {
    double gamma = 0.0;
    std::vector<std::vector<double>> samples; // [ell-1] -> C_ell / gamma samples
    std::vector<double> sample_mean;
    std::vector<double> sample_se;
    std::vector<double> reference_mean; // sum_{m > ell} 2/(m(m-1))
    std::vector<double> ks_statistic;   // against a simulated limit sample
};

CoalescentSpectrum coalescent_spectrum(const VotingKernel& kernel, std::size_t replicas,
                                       std::uint64_t seed, int max_ell = 2, int threads = 0);

} // namespace wfgame
