#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace monoembed {

// All randomized code in the library draws through this wrapper so that a
// seed reproduces bit-for-bit anywhere. The engine is the standard
// mt19937_64 (fully specified by the C++ standard); raw 64-bit outputs are
// mapped to [0,1) by taking the top 53 bits, and index draws use
// floor(u * n). Distribution classes from <random> are never used, since
// their output is not pinned across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). n must be positive and comfortably below 2^53.
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(unit() * static_cast<double>(n));
    }

    bool coin(double p) { return unit() < p; }

    // First k entries of a uniform random permutation of [0, n).
    std::vector<int> sample_indices(std::size_t n, std::size_t k) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < k && i < n; ++i) {
            std::size_t j = i + below(n - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k < n ? k : n);
        return idx;
    }

    template <class T>
    std::vector<T> sample_from(const std::vector<T>& pool, std::size_t k) {
        auto idx = sample_indices(pool.size(), k);
        std::vector<T> out;
        out.reserve(idx.size());
        for (int i : idx) out.push_back(pool[i]);
        return out;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

// Deterministic stream splitting: hash a tuple of tags into a sub-seed so
// that parallel or per-object draws do not depend on evaluation order.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
    x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27; x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

template <class... Ts>
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, Ts... rest) {
    return mix_seed(mix_seed(a, b), static_cast<std::uint64_t>(rest)...);
}

}  // namespace monoembed
