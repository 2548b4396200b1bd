#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wfgame/common.hpp"

namespace wfgame {

struct WeightedEdge {
    int x = 0;
    int y = 0;
    double weight = 1.0;
};

/// An irreducible, reversible transition matrix with zero diagonal together
/// with its stationary distribution. Immutable once constructed; safe to
/// share across threads.
class VotingKernel {
public:
    // q(x,y) = 1/(n-1) off the diagonal; pi uniform.
    static VotingKernel complete(int n);

    // Nearest-neighbour walk on the n-cycle: q(x, x+-1 mod n) = 1/2.
    static VotingKernel cycle(int n);

    // Simple k-regular graph from the pairing model, rejecting matchings
    // with self-loops or parallel edges (full restart, budget 10^4).
    // Deterministic given (n, k, seed).
    static VotingKernel random_regular(int n, int k, std::uint64_t seed);

    // Random walk on a weighted undirected graph: q(x,y) = w(x,y)/deg(x),
    // pi(x) proportional to deg(x). Edges are undirected; repeated edges
    // accumulate weight.
    static VotingKernel from_weighted_graph(int n, const std::vector<WeightedEdge>& edges);

    // 3-regular Petersen graph (outer 5-cycle, inner pentagram, spokes).
    static VotingKernel petersen();

    // Generic kernel; pi computed by power iteration on the lazy chain
    // (tolerance 1e-13, at most 10^6 sweeps).
    static VotingKernel from_matrix(Eigen::MatrixXd q);

    // Generic kernel with a known stationary distribution (validated).
    static VotingKernel from_matrix(Eigen::MatrixXd q, Eigen::VectorXd pi);

    int size() const { return static_cast<int>(pi_.size()); }
    const Eigen::MatrixXd& q() const { return q_; }
    const Eigen::VectorXd& pi() const { return pi_; }

    double pi_min() const { return pi_.minCoeff(); }
    double pi_max() const { return pi_.maxCoeff(); }

    // total mass of nu(x,y) = pi(x)^2 q(x,y); equals sum_x pi(x)^2
    double nu_total() const { return pi_.squaredNorm(); }

    const std::vector<int>& neighbors(int x) const { return adj_[x]; }

    // Inverse-CDF sample from q(x, .) given a uniform variate in [0,1).
    int sample_neighbor(int x, double u) const;

    // Degree if every site has the same number of neighbors, else 0.
    int regular_degree() const;

private:
    VotingKernel(Eigen::MatrixXd q, Eigen::VectorXd pi);
    void validate() const;
    void build_adjacency();

    Eigen::MatrixXd q_;
    Eigen::VectorXd pi_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<double>> cum_; // cumulative q along adj_[x]
};

/// Spectral and return-probability summary of a kernel.
struct KernelAnalysis {
    double pi_min = 0.0;
    double pi_max = 0.0;
    Eigen::VectorXd eigenvalues;   // sorted descending; leading value is 1
    double spectral_gap = 0.0;     // 1 - second largest eigenvalue
    double absolute_gap = 0.0;     // 1 - largest non-unit |eigenvalue|
    double mixing_time_bound = 0.0; // absolute_gap^-1 * log(2e/pi_min)
    Eigen::MatrixXd nu;            // nu(x,y) = pi(x)^2 q(x,y)
    double nu_total = 0.0;
    std::vector<Eigen::VectorXd> return_probs; // [ell](x) = q^ell(x,x), ell = 0..L
    std::vector<double> r_modal;               // pi-modal value of q^ell(x,x)
    std::vector<double> r_modal_mass;          // pi-mass of sites attaining it
};

// Exact matrix powers up to max_ell; eigenvalues via the symmetrized
// similarity transform diag(pi)^{1/2} q diag(pi)^{-1/2}.
KernelAnalysis analyze(const VotingKernel& kernel, int max_ell);

} // namespace wfgame
