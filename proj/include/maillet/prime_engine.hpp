#pragma once

// Segmented prime generation and the primality, counting and gap queries the
// other modules are built on.
//
// PrimeTable layout: one bit per odd integer in [lo, hi], bit i <-> the i-th
// odd number >= lo. The only even prime, 2, is answered without the bitmap.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace maillet {

struct SieveOptions {
    // Widest [lo, hi] a single table may cover. The bitmap costs span/16 bytes.
    std::uint64_t max_span = std::uint64_t{1} << 33;
    // Integers sieved per pass; base primes are shared by all passes.
    std::uint64_t segment_width = std::uint64_t{1} << 20;
};

class PrimeTable {
public:
    std::uint64_t lo() const noexcept { return lo_; }
    std::uint64_t hi() const noexcept { return hi_; }

    bool contains(std::uint64_t n) const noexcept { return n >= lo_ && n <= hi_; }

    // n must lie in [lo, hi]; throws std::out_of_range otherwise.
    bool is_prime(std::uint64_t n) const;

    // Number of primes in [lo, hi].
    std::uint64_t count() const noexcept;

    // Ascending list of all primes in [lo, hi].
    std::vector<std::uint64_t> primes() const;

    template <class Fn>
    void for_each_prime(Fn&& fn) const {
        if (lo_ <= 2 && hi_ >= 2) fn(std::uint64_t{2});
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                const int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                fn(first_odd_ + 2 * (64 * static_cast<std::uint64_t>(w) + b));
            }
        }
    }

private:
    friend PrimeTable sieve_segment(std::uint64_t, std::uint64_t, const SieveOptions&);

    PrimeTable(std::uint64_t lo, std::uint64_t hi);

    std::uint64_t lo_;
    std::uint64_t hi_;
    std::uint64_t first_odd_;  // smallest odd >= lo
    std::uint64_t odd_count_;  // odds in [lo, hi]
    std::vector<std::uint64_t> words_;
};

// Marks exactly the primes in [lo, hi] (both ends inclusive).
// Throws std::invalid_argument when lo >= hi and DomainError when the span
// exceeds options.max_span.
PrimeTable sieve_segment(std::uint64_t lo, std::uint64_t hi,
                         const SieveOptions& options = {});

// All primes <= limit via a plain sieve; used for base primes and small tables.
std::vector<std::uint32_t> small_primes(std::uint32_t limit);

std::uint64_t isqrt(std::uint64_t n) noexcept;

// Deterministic Miller-Rabin over the full 64-bit range.
bool is_prime(std::uint64_t n) noexcept;

// Smallest prime > n. Throws OverflowError past the last 64-bit prime.
std::uint64_t next_prime(std::uint64_t n);

// pi(x).
std::uint64_t prime_count(std::uint64_t x, const SieveOptions& options = {});

// p_i with p_1 = 2. Throws std::invalid_argument for i == 0.
std::uint64_t nth_prime(std::uint64_t i, const SieveOptions& options = {});

struct PrimePair {
    std::uint64_t p;
    std::uint64_t q;
    friend bool operator==(const PrimePair&, const PrimePair&) = default;
};

// Every consecutive pair (p, q) with p in [lo, hi). q may exceed hi.
std::vector<PrimePair> gaps(std::uint64_t lo, std::uint64_t hi,
                            const SieveOptions& options = {});

struct BrunTitchmarshCheck {
    std::uint64_t pi_diff;  // pi(x + y) - pi(x)
    double bound;           // 2y / log y
    bool holds;
};

// Compares the prime count of (x, x + y] against 2y/log y. Requires x >= 1,
// y >= 3: the bound is meaningless at y = 1 and blows up around it.
BrunTitchmarshCheck bt_check(std::uint64_t x, std::uint64_t y,
                             const SieveOptions& options = {});

} // namespace maillet
