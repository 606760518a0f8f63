#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace monoembed {

// Fixed-width bit vector over 64-bit words. Rows of the host adjacency
// structure and candidate sets are stored in this form so that
// intersection cardinalities reduce to word AND + popcount.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t nbits)
        : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return nbits_; }
    std::size_t words() const { return w_.size(); }
    const std::uint64_t* data() const { return w_.data(); }
    std::uint64_t* data() { return w_.data(); }

    void set(std::size_t i) { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool test(std::size_t i) const {
        return (w_[i >> 6] >> (i & 63)) & 1;
    }
    void clear() { for (auto& x : w_) x = 0; }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto x : w_) c += std::popcount(x);
        return c;
    }

    Bitset& operator&=(const Bitset& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
        return *this;
    }

    bool operator==(const Bitset& o) const {
        return nbits_ == o.nbits_ && w_ == o.w_;
    }

    // Index of the next set bit at position >= from, or size() if none.
    std::size_t find_next(std::size_t from) const {
        if (from >= nbits_) return nbits_;
        std::size_t k = from >> 6;
        std::uint64_t cur = w_[k] & (~std::uint64_t{0} << (from & 63));
        while (true) {
            if (cur) return k * 64 + std::countr_zero(cur);
            if (++k == w_.size()) return nbits_;
            cur = w_[k];
        }
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = find_next(0); i < nbits_; i = find_next(i + 1)) f(i);
    }

    std::vector<int> to_indices() const {
        std::vector<int> out;
        for_each([&](std::size_t i) { out.push_back(static_cast<int>(i)); });
        return out;
    }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> w_;
};

inline std::size_t and_count(const Bitset& a, const Bitset& b) {
    std::size_t c = 0;
    const std::uint64_t* pa = a.data();
    const std::uint64_t* pb = b.data();
    std::size_t n = a.words() < b.words() ? a.words() : b.words();
    for (std::size_t k = 0; k < n; ++k) c += std::popcount(pa[k] & pb[k]);
    return c;
}

// popcount of (row & mask) where row is a raw word span of the same width.
inline std::size_t and_count_raw(const std::uint64_t* row, const Bitset& mask) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < mask.words(); ++k) c += std::popcount(row[k] & mask.data()[k]);
    return c;
}

inline Bitset make_mask(std::size_t nbits, const std::vector<int>& members) {
    Bitset b(nbits);
    for (int m : members) b.set(static_cast<std::size_t>(m));
    return b;
}

}  // namespace monoembed
