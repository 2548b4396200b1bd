#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "wfgame/kernel.hpp"
#include "wfgame/rng.hpp"

namespace testutil {

// naive cubic matrix power, independent of the library's analysis path
inline Eigen::MatrixXd naive_power(const Eigen::MatrixXd& m, int ell) {
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n);
    for (int step = 0; step < ell; ++step) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                for (int j = 0; j < n; ++j) next(i, j) += out(i, k) * m(k, j);
            }
        }
        out = next;
    }
    return out;
}

// connected weighted graph: a random spanning tree plus a few extra edges
inline wfgame::VotingKernel random_kernel(wfgame::Rng& rng, int min_n = 2, int max_n = 10) {
    int n = min_n + static_cast<int>(rng.uniform_int(max_n - min_n + 1));
    std::vector<wfgame::WeightedEdge> edges;
    for (int x = 1; x < n; ++x) {
        int y = static_cast<int>(rng.uniform_int(x));
        edges.push_back({x, y, 0.1 + 1.9 * rng.uniform()});
    }
    int extra = static_cast<int>(rng.uniform_int(n));
    for (int e = 0; e < extra; ++e) {
        int x = static_cast<int>(rng.uniform_int(n));
        int y = static_cast<int>(rng.uniform_int(n));
        if (x != y) edges.push_back({x, y, 0.1 + 1.9 * rng.uniform()});
    }
    return wfgame::VotingKernel::from_weighted_graph(n, edges);
}

// exact fixation probability of the death-birth game on the complete graph,
// lumped on the count of ones (birth-death chain solved in closed form)
inline double lumped_fixation_complete(int n, double w, double b, double c, int m0) {
    std::vector<double> rho(n - 1);
    for (int m = 1; m <= n - 1; ++m) {
        double pay1 = ((m - 1) * (b - c) + (n - m) * (-c)) / (n - 1.0);
        double pay0 = (m * b) / (n - 1.0);
        double f1 = (1.0 - w) + w * pay1;
        double f0 = (1.0 - w) + w * pay0;
        double up = (n - m) / static_cast<double>(n) * (m * f1) / (m * f1 + (n - 1 - m) * f0);
        double down = m / static_cast<double>(n) * ((n - m) * f0) / ((m - 1) * f1 + (n - m) * f0);
        rho[m - 1] = down / up;
    }
    double num = 0.0, den = 0.0, prod = 1.0;
    for (int j = 0; j <= n - 1; ++j) {
        if (j > 0) prod *= rho[j - 1];
        if (j < m0) num += prod;
        den += prod;
    }
    return num / den;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

} // namespace testutil
