#pragma once
// Deterministic random streams. Everything here is fully specified by the
// C++ standard (mt19937_64) or implemented by hand, so the same seed gives
// the same bytes on every platform. std::uniform_*_distribution and
// std::hash are deliberately avoided: their output is implementation-defined.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pusheval {

// FNV-1a: stable string hash used to derive per-entity stream seeds.
std::uint64_t fnv1a64(std::string_view s);

// Folds components into one seed via splitmix64 steps. Order matters.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, bound); bound > 0. Multiply-shift, no rejection loop.
    std::uint64_t below(std::uint64_t bound);

    // Uniform integer in [lo, hi], inclusive.
    int int_in(int lo, int hi);
    std::int64_t int64_in(std::int64_t lo, std::int64_t hi);

    // Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), ascending. k <= n.
    std::vector<int> sample_indices(int n, int k);

private:
    std::mt19937_64 eng_;
};

}  // namespace pusheval
