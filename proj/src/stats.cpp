#include "wfgame/stats.hpp"

#include <algorithm>
#include <cmath>

namespace wfgame {

EnsembleSummary summarize(const std::vector<double>& values,
                          const std::optional<std::vector<double>>& weights) {
    if (values.empty()) throw InvalidInput("summarize: empty sample set");
    EnsembleSummary out;
    out.n = values.size();
    const double n = static_cast<double>(values.size());

    if (!weights) {
        double sum = 0.0;
        for (double v : values) sum += v;
        out.mean = sum / n;
        double ss = 0.0;
        bool bernoulli = true;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
            if (v != 0.0 && v != 1.0) bernoulli = false;
        }
        double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
        out.std_error = std::sqrt(var / n);
        out.ess = n;
        if (bernoulli) {
            // Wilson 95% interval, well-behaved near 0 and 1
            const double z = 1.959963984540054;
            double p = out.mean;
            double denom = 1.0 + z * z / n;
            double center = (p + z * z / (2.0 * n)) / denom;
            double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
            out.ci_low = center - half;
            out.ci_high = center + half;
        } else {
            const double z = 1.959963984540054;
            out.ci_low = out.mean - z * out.std_error;
            out.ci_high = out.mean + z * out.std_error;
        }
        return out;
    }

    const auto& w = *weights;
    if (w.size() != values.size()) throw InvalidInput("summarize: weights size mismatch");
    double wsum = 0.0, wsq = 0.0;
    for (double wi : w) {
        if (wi < 0.0) throw InvalidInput("summarize: negative weight");
        wsum += wi;
        wsq += wi * wi;
    }
    if (wsum <= 0.0) throw InvalidInput("summarize: degenerate weights (all zero)");
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) mean += w[i] * values[i];
    mean /= wsum;
    // delta-method variance of the self-normalized estimator
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double d = values[i] - mean;
        var += w[i] * w[i] * d * d;
    }
    var /= wsum * wsum;
    out.mean = mean;
    out.std_error = std::sqrt(var);
    out.ess = wsum * wsum / wsq;
    const double z = 1.959963984540054;
    out.ci_low = mean - z * out.std_error;
    out.ci_high = mean + z * out.std_error;
    return out;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InvalidInput("wasserstein1: empty sample set");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.size() == b.size()) {
        // equal sizes: mean absolute difference of order statistics
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
        return acc / static_cast<double>(a.size());
    }
    // integral of |F_a - F_b| over the merged support
    double acc = 0.0;
    std::size_t ia = 0, ib = 0;
    double prev = std::min(a[0], b[0]);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (ia < a.size() || ib < b.size()) {
        double next;
        if (ib == b.size() || (ia < a.size() && a[ia] <= b[ib])) {
            next = a[ia];
        } else {
            next = b[ib];
        }
        acc += std::abs(ia / na - ib / nb) * (next - prev);
        prev = next;
        while (ia < a.size() && a[ia] == prev) ++ia;
        while (ib < b.size() && b[ib] == prev) ++ib;
    }
    return acc;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InvalidInput("two_sample_ks: empty sample set");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    std::size_t ia = 0, ib = 0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (ia < a.size() && ib < b.size()) {
        double point = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] == point) ++ia;
        while (ib < b.size() && b[ib] == point) ++ib;
        ks = std::max(ks, std::abs(ia / na - ib / nb));
    }
    return ks;
}

TabulatedFn TabulatedFn::identity(int points) {
    if (points < 2) throw InvalidInput("tabulated function: need at least two points");
    TabulatedFn f;
    f.values.resize(points);
    for (int i = 0; i < points; ++i) f.values[i] = static_cast<double>(i) / (points - 1);
    return f;
}

TabulatedFn TabulatedFn::constant(double c) {
    return TabulatedFn{{c, c}};
}

double TabulatedFn::operator()(double y) const {
    if (values.size() < 2) throw InvalidInput("tabulated function: need at least two points");
    double clamped = std::min(1.0, std::max(0.0, y));
    double pos = clamped * (values.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo >= values.size() - 1) return values.back();
    double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

double occupation_integral(const TrajectoryRecord& traj, const TabulatedFn& f) {
    const auto& t = traj.sample_times;
    if (t.empty()) return 0.0;
    double cutoff = traj.absorption ? traj.absorption->time : traj.final_time;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        double hold = std::min(t[i + 1], cutoff) - t[i];
        if (hold <= 0.0) break;
        acc += f(traj.p1[i]) * hold;
    }
    if (!t.empty() && cutoff > t.back()) acc += f(traj.p1.back()) * (cutoff - t.back());
    return acc;
}

} // namespace wfgame
