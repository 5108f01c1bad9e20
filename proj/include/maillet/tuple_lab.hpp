#pragma once

// Admissible k-tuples and the sparse interval geometry used to place one
// offset per interval.

#include <cstdint>
#include <span>
#include <vector>

namespace maillet {

// Sorted set of distinct non-negative offsets h_1 < ... < h_k, k >= 1.
class KTuple {
public:
    // Throws std::invalid_argument unless offsets is non-empty and strictly
    // increasing.
    explicit KTuple(std::vector<std::uint64_t> offsets);

    // Sorts and validates distinctness; convenient for user input.
    static KTuple from_unsorted(std::vector<std::uint64_t> offsets);

    std::size_t k() const noexcept { return offsets_.size(); }
    std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
    std::uint64_t front() const noexcept { return offsets_.front(); }
    std::uint64_t back() const noexcept { return offsets_.back(); }
    std::uint64_t diameter() const noexcept { return offsets_.back() - offsets_.front(); }
    bool contains(std::uint64_t h) const noexcept;

    // Same tuple with h inserted (or unchanged if already present).
    KTuple with(std::uint64_t h) const;

    // Every offset shifted by c. Throws OverflowError on wraparound.
    KTuple shifted(std::uint64_t c) const;

    friend bool operator==(const KTuple&, const KTuple&) = default;

private:
    std::vector<std::uint64_t> offsets_;
};

// Closed integer interval [lo, hi].
struct IntegerInterval {
    std::uint64_t lo;
    std::uint64_t hi;

    bool contains(std::uint64_t n) const noexcept { return n >= lo && n <= hi; }
    std::uint64_t length() const noexcept { return hi - lo; }
    friend bool operator==(const IntegerInterval&, const IntegerInterval&) = default;
};

// nu_p(H): number of residue classes mod p hit by H. Throws
// std::invalid_argument when p is not prime.
std::size_t residues_covered(const KTuple& tuple, std::uint64_t p);

// nu_p(H) < p for every prime p. Only p <= k can fail, since nu_p <= k.
bool is_admissible(const KTuple& tuple);

// ceil((6/eps)^2) for 0 < eps <= 1. Inputs like 0.3 whose binary value lands
// a hair past an integer square are snapped to that integer.
std::uint64_t k_from_epsilon(double eps);

// Scans candidates in ascending order, keeping each one whose addition leaves
// the partial tuple admissible, until k are kept. Throws DomainError if the
// candidates run out first.
KTuple greedy_admissible(std::size_t k, std::span<const std::uint64_t> candidates);

struct IntervalEntry {
    std::uint64_t base;       // H_nu
    std::uint64_t width;      // floor(H_nu^eps)
    IntegerInterval full;     // I_nu  = [H_nu, H_nu + width]
    IntegerInterval window;   // I'_nu = [H_nu + ceil(width/2), H_nu + width]
};

struct IntervalSystem {
    double epsilon;
    std::vector<IntervalEntry> entries;
};

// H_1 = h1 and each later H_nu is the least integer with H_nu^eps > 2 H_{nu-1}.
// Throws std::invalid_argument for eps outside (0, 1], h1 < 2 or count == 0,
// and OverflowError when an interval leaves the 64-bit range.
IntervalSystem interval_system(double eps, std::uint64_t h1, std::size_t count);

// One offset per window I'_1..I'_k, chosen greedily (smallest admissible
// value first). The nu-th offset is additionally kept at least H_nu above the
// previous one so that h_mu - h_nu lands in I_mu for every nu < mu. Throws
// DomainError naming the first window with no valid choice.
KTuple pick_tuple_in_windows(const IntervalSystem& system, std::size_t k);

} // namespace maillet
