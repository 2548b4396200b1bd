#pragma once

#include <cstdint>
#include <vector>

#include "wfgame/common.hpp"

namespace wfgame {

/// A {1,0} assignment over sites, bit-packed, with a cached count of ones.
class Configuration {
public:
    explicit Configuration(int n, int fill = 0) : n_(n), words_((n + 63) / 64, 0) {
        if (n < 1) throw InvalidInput("configuration: need at least one site");
        if (fill) {
            for (auto& w : words_) w = ~0ULL;
            trim();
            ones_ = n_;
        }
    }

    static Configuration all_ones(int n) { return Configuration(n, 1); }
    static Configuration all_zeros(int n) { return Configuration(n, 0); }

    static Configuration from_types(const std::vector<int>& types) {
        Configuration c(static_cast<int>(types.size()));
        for (int x = 0; x < c.n_; ++x) {
            if (types[x]) c.set(x, 1);
        }
        return c;
    }

    // exactly the sites in `ones` set to 1
    static Configuration with_ones(int n, const std::vector<int>& ones) {
        Configuration c(n);
        for (int x : ones) {
            if (x < 0 || x >= n) throw InvalidInput("configuration: site index out of range");
            c.set(x, 1);
        }
        return c;
    }

    int size() const { return n_; }
    int ones_count() const { return ones_; }

    int get(int x) const { return static_cast<int>((words_[x >> 6] >> (x & 63)) & 1ULL); }

    void set(int x, int value) {
        std::uint64_t mask = 1ULL << (x & 63);
        std::uint64_t& w = words_[x >> 6];
        int old = static_cast<int>((w >> (x & 63)) & 1ULL);
        if (old == value) return;
        w ^= mask;
        ones_ += value ? 1 : -1;
    }

    bool is_all_ones() const { return ones_ == n_; }
    bool is_all_zeros() const { return ones_ == 0; }

    bool operator==(const Configuration& other) const {
        return n_ == other.n_ && words_ == other.words_;
    }

    std::vector<int> to_types() const {
        std::vector<int> t(n_);
        for (int x = 0; x < n_; ++x) t[x] = get(x);
        return t;
    }

private:
    void trim() {
        int rem = n_ & 63;
        if (rem) words_.back() &= (1ULL << rem) - 1;
    }

    int n_ = 0;
    int ones_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace wfgame
