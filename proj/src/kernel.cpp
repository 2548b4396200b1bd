#include "wfgame/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include "wfgame/rng.hpp"

namespace wfgame {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kDetailedBalanceTol = 1e-9;

Eigen::VectorXd stationary_by_power_iteration(const Eigen::MatrixXd& q) {
    const int n = static_cast<int>(q.rows());
    // Symmetric q is doubly stochastic; pi is uniform.
    if ((q - q.transpose()).cwiseAbs().maxCoeff() < 1e-14) {
        return Eigen::VectorXd::Constant(n, 1.0 / n);
    }
    // Lazy chain (q + I)/2 shares the stationary vector and is aperiodic,
    // so left power iteration converges for any irreducible q.
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / n);
    const long max_iter = 1000000;
    for (long it = 0; it < max_iter; ++it) {
        Eigen::RowVectorXd next = 0.5 * (pi * q + pi);
        next /= next.sum();
        double delta = (next - pi).cwiseAbs().maxCoeff();
        pi = next;
        if (delta < 1e-13) return pi.transpose();
    }
    throw SimulationError("stationary distribution: power iteration did not converge");
}

} // namespace

VotingKernel::VotingKernel(Eigen::MatrixXd q, Eigen::VectorXd pi)
    : q_(std::move(q)), pi_(std::move(pi)) {
    validate();
    build_adjacency();
}

void VotingKernel::validate() const {
    const int n = static_cast<int>(q_.rows());
    if (n < 2 || q_.cols() != n || pi_.size() != n) {
        throw InvalidInput("voting kernel: need a square matrix of size >= 2");
    }
    if (q_.minCoeff() < 0.0) throw InvalidInput("voting kernel: negative entry");
    for (int x = 0; x < n; ++x) {
        if (q_(x, x) != 0.0) throw InvalidInput("voting kernel: nonzero diagonal entry");
        if (std::abs(q_.row(x).sum() - 1.0) > kRowSumTol) {
            throw InvalidInput("voting kernel: row " + std::to_string(x) + " does not sum to 1");
        }
    }
    if (pi_.minCoeff() <= 0.0) throw InvalidInput("voting kernel: stationary weight <= 0");
    if (std::abs(pi_.sum() - 1.0) > kRowSumTol) {
        throw InvalidInput("voting kernel: stationary distribution does not sum to 1");
    }
    // detailed balance, relative to the larger flux
    for (int x = 0; x < n; ++x) {
        for (int y = x + 1; y < n; ++y) {
            double fxy = pi_(x) * q_(x, y);
            double fyx = pi_(y) * q_(y, x);
            double scale = std::max(fxy, fyx);
            if (std::abs(fxy - fyx) > kDetailedBalanceTol * scale) {
                throw InvalidInput("voting kernel: detailed balance fails for pair (" +
                                   std::to_string(x) + "," + std::to_string(y) + ")");
            }
        }
    }
    // irreducibility: BFS over the support graph (symmetric under detailed balance)
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y = 0; y < n; ++y) {
            if (!seen[y] && (q_(x, y) > 0.0 || q_(y, x) > 0.0)) {
                seen[y] = 1;
                ++count;
                stack.push_back(y);
            }
        }
    }
    if (count != n) throw InvalidInput("voting kernel: support graph is not connected");
}

void VotingKernel::build_adjacency() {
    const int n = size();
    adj_.assign(n, {});
    cum_.assign(n, {});
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int y = 0; y < n; ++y) {
            if (q_(x, y) > 0.0) {
                acc += q_(x, y);
                adj_[x].push_back(y);
                cum_[x].push_back(acc);
            }
        }
        cum_[x].back() = 1.0; // guard against rounding in the last bin
    }
}

int VotingKernel::sample_neighbor(int x, double u) const {
    const auto& c = cum_[x];
    auto it = std::upper_bound(c.begin(), c.end(), u);
    if (it == c.end()) --it;
    return adj_[x][static_cast<std::size_t>(it - c.begin())];
}

int VotingKernel::regular_degree() const {
    std::size_t k = adj_[0].size();
    for (const auto& row : adj_) {
        if (row.size() != k) return 0;
    }
    return static_cast<int>(k);
}

VotingKernel VotingKernel::complete(int n) {
    if (n < 2) throw InvalidInput("complete kernel: need n >= 2");
    Eigen::MatrixXd q = Eigen::MatrixXd::Constant(n, n, 1.0 / (n - 1));
    q.diagonal().setZero();
    return VotingKernel(std::move(q), Eigen::VectorXd::Constant(n, 1.0 / n));
}

VotingKernel VotingKernel::cycle(int n) {
    if (n < 3) throw InvalidInput("cycle kernel: need n >= 3");
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        q(x, (x + 1) % n) += 0.5;
        q(x, (x + n - 1) % n) += 0.5;
    }
    return VotingKernel(std::move(q), Eigen::VectorXd::Constant(n, 1.0 / n));
}

VotingKernel VotingKernel::random_regular(int n, int k, std::uint64_t seed) {
    if (k < 3) throw InvalidInput("random regular kernel: need k >= 3");
    if (k >= n) throw InvalidInput("random regular kernel: need k < n");
    if ((static_cast<long long>(n) * k) % 2 != 0) {
        throw InvalidInput("random regular kernel: n*k must be even");
    }
    Rng rng(seed);
    const int restarts = 10000;
    std::vector<int> stubs(static_cast<std::size_t>(n) * k);
    for (int attempt = 0; attempt < restarts; ++attempt) {
        for (int x = 0; x < n; ++x) {
            std::fill_n(stubs.begin() + static_cast<std::size_t>(x) * k, k, x);
        }
        // Fisher-Yates
        for (std::size_t i = stubs.size() - 1; i > 0; --i) {
            std::size_t j = rng.uniform_int(i + 1);
            std::swap(stubs[i], stubs[j]);
        }
        std::set<std::pair<int, int>> edges;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int a = stubs[i], b = stubs[i + 1];
            if (a == b) { ok = false; break; }
            auto e = std::minmax(a, b);
            if (!edges.emplace(e.first, e.second).second) { ok = false; break; }
        }
        if (!ok) continue;
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [a, b] : edges) {
            q(a, b) = 1.0 / k;
            q(b, a) = 1.0 / k;
        }
        return VotingKernel(std::move(q), Eigen::VectorXd::Constant(n, 1.0 / n));
    }
    throw SimulationError("random regular kernel: rejection budget exhausted");
}

VotingKernel VotingKernel::from_weighted_graph(int n, const std::vector<WeightedEdge>& edges) {
    if (n < 2) throw InvalidInput("weighted graph kernel: need n >= 2");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges) {
        if (e.x < 0 || e.x >= n || e.y < 0 || e.y >= n) {
            throw InvalidInput("weighted graph kernel: site index out of range");
        }
        if (e.x == e.y) throw InvalidInput("weighted graph kernel: self-loop violates the zero trace");
        if (!(e.weight > 0.0)) throw InvalidInput("weighted graph kernel: edge weight must be positive");
        w(e.x, e.y) += e.weight;
        w(e.y, e.x) += e.weight;
    }
    Eigen::VectorXd deg = w.rowwise().sum();
    if (deg.minCoeff() <= 0.0) throw InvalidInput("weighted graph kernel: isolated site");
    Eigen::MatrixXd q = deg.cwiseInverse().asDiagonal() * w;
    Eigen::VectorXd pi = deg / deg.sum();
    return VotingKernel(std::move(q), std::move(pi)); // connectivity checked in validate()
}

VotingKernel VotingKernel::petersen() {
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < 5; ++i) {
        edges.push_back({i, (i + 1) % 5, 1.0});             // outer cycle
        edges.push_back({5 + i, 5 + (i + 2) % 5, 1.0});     // inner pentagram
        edges.push_back({i, 5 + i, 1.0});                   // spokes
    }
    return from_weighted_graph(10, edges);
}

VotingKernel VotingKernel::from_matrix(Eigen::MatrixXd q) {
    Eigen::VectorXd pi = stationary_by_power_iteration(q);
    return VotingKernel(std::move(q), std::move(pi));
}

VotingKernel VotingKernel::from_matrix(Eigen::MatrixXd q, Eigen::VectorXd pi) {
    return VotingKernel(std::move(q), std::move(pi));
}

KernelAnalysis analyze(const VotingKernel& kernel, int max_ell) {
    if (max_ell < 0) throw InvalidInput("analyze: max_ell must be >= 0");
    const int n = kernel.size();
    const Eigen::MatrixXd& q = kernel.q();
    const Eigen::VectorXd& pi = kernel.pi();

    KernelAnalysis out;
    out.pi_min = kernel.pi_min();
    out.pi_max = kernel.pi_max();
    out.nu = pi.cwiseProduct(pi).asDiagonal() * q;
    out.nu_total = out.nu.sum();

    // Reversibility makes diag(pi)^{1/2} q diag(pi)^{-1/2} symmetric.
    Eigen::VectorXd sqrt_pi = pi.cwiseSqrt();
    Eigen::MatrixXd sym = sqrt_pi.asDiagonal() * q * sqrt_pi.cwiseInverse().asDiagonal();
    sym = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues().reverse(); // descending
    out.eigenvalues = ev;
    out.spectral_gap = 1.0 - ev(1);
    double max_abs = 0.0;
    for (int i = 1; i < n; ++i) max_abs = std::max(max_abs, std::abs(ev(i)));
    out.absolute_gap = 1.0 - max_abs;
    out.mixing_time_bound = out.absolute_gap > 0.0
        ? std::log(2.0 * std::exp(1.0) / out.pi_min) / out.absolute_gap
        : std::numeric_limits<double>::infinity();

    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (int ell = 0; ell <= max_ell; ++ell) {
        if (ell > 0) power = power * q;
        Eigen::VectorXd diag = power.diagonal();
        out.return_probs.push_back(diag);

        // pi-weighted mode over value clusters (tolerance 1e-9)
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return diag(a) < diag(b); });
        double best_mass = -1.0, best_value = 0.0;
        int i = 0;
        while (i < n) {
            int j = i;
            double mass = 0.0, weighted = 0.0;
            while (j < n && diag(order[j]) - diag(order[i]) <= 1e-9) {
                mass += pi(order[j]);
                weighted += pi(order[j]) * diag(order[j]);
                ++j;
            }
            if (mass > best_mass) {
                best_mass = mass;
                best_value = weighted / mass;
            }
            i = j;
        }
        out.r_modal.push_back(best_value);
        out.r_modal_mass.push_back(best_mass);
    }
    return out;
}

} // namespace wfgame
