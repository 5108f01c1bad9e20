#pragma once

// Goldbach (sum of two primes) and Maillet (difference of two primes)
// classification with explicit witnesses, interval coverage scans, and
// consecutive-gap statistics.

#include "maillet/parallel.hpp"
#include "maillet/prime_engine.hpp"
#include "maillet/tuple_lab.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace maillet {

enum class WitnessKind { goldbach, maillet };

// goldbach: p + q = n; maillet: p - q = n. p and q are prime.
struct Witness {
    std::uint64_t n;
    std::uint64_t p;
    std::uint64_t q;
    WitnessKind kind;

    bool valid() const noexcept;
    friend bool operator==(const Witness&, const Witness&) = default;
};

// Smallest prime q <= n/2 with n - q prime. Requires n >= 2.
std::optional<Witness> is_goldbach(std::uint64_t n);

// Smallest prime q <= bound with q + n prime. std::nullopt means no witness
// under the bound, which says nothing about larger q. Requires n >= 1 and
// bound >= 2.
std::optional<Witness> is_maillet(std::uint64_t n, std::uint64_t bound);

enum class Parity { even, all };

struct ScanReport {
    IntegerInterval interval;        // [x, x + len]
    std::uint64_t search_bound;
    Parity parity;
    std::uint64_t scanned;
    std::uint64_t represented;
    std::vector<std::uint64_t> exceptions;  // unrepresented under the bound, ascending
    std::vector<Witness> witnesses;         // filled when requested, ascending n
};

// Classifies every n in [x, x + len] of the selected parity with is_maillet.
// n = 0 is never scanned.
ScanReport scan_interval(std::uint64_t x, std::uint64_t len, std::uint64_t bound, Parity parity,
                         bool keep_witnesses = false, Parallelism par = {});

// #{consecutive primes p < q with q - p = d and q <= x}. d must be 1 or even,
// x >= 3.
std::uint64_t polignac_count(std::uint64_t d, std::uint64_t x);

enum class GapNormalizer { log_p, log_n };

struct GapHistogram {
    double bin_width;
    GapNormalizer normalizer;
    std::vector<std::uint64_t> counts;  // bin b covers [b w, (b+1) w)
    std::vector<double> samples;        // in pair order
    std::uint64_t skipped;              // pairs whose normalizer is log 1 = 0
    double max_sample;

    std::uint64_t mass() const noexcept;
};

// (p_{n+1} - p_n) / log p_n, or / log n, for each consecutive pair with
// p_n in [lo, hi). With log_n the pair (2, 3), index n = 1, has no finite
// value and is counted in skipped.
GapHistogram normalized_gap_histogram(std::uint64_t lo, std::uint64_t hi, double bin_width,
                                      GapNormalizer normalizer);

} // namespace maillet
