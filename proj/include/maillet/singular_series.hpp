#pragma once

// Singular series S(H) = prod_p (1 - 1/p)^{-k} (1 - nu_p(H)/p) with a
// certified enclosure, plus the ratios S(H u {m}) / S(H) and their averages.

#include "maillet/parallel.hpp"
#include "maillet/tuple_lab.hpp"

#include <cstdint>
#include <vector>

namespace maillet {

// Truncated product over p <= truncation_prime. The true value lies in
// [value * exp(-tail_bound), value * exp(tail_bound)]; tail_bound covers the
// omitted primes and floating-point rounding of the kept factors.
struct SeriesValue {
    double value;
    std::uint64_t truncation_prime;
    double tail_bound;

    double lower() const noexcept;
    double upper() const noexcept;
    bool encloses(double x) const noexcept { return x >= lower() && x <= upper(); }
};

// Smallest truncation accepted for a tuple: max(2k, h_k - h_1 + 1).
std::uint64_t min_truncation(const KTuple& tuple);

// Upper bound for sum_{p > x} 1/p^2, x >= 2.
double prime_reciprocal_square_tail(std::uint64_t x);

// Throws std::invalid_argument if p0 < min_truncation(tuple). Inadmissible
// tuples give value 0 with tail_bound 0.
SeriesValue singular_series(const KTuple& tuple, std::uint64_t p0);

// Certified lower bound for
//   c1(k) = prod_{p <= 2k} 1/p * prod_{p > 2k} (1 - k/p)(1 - 1/p)^{-k}.
// Requires k >= 1 and p0 > 2k.
double c1_lower_bound(std::uint64_t k, std::uint64_t p0);

// Ratio engine for a fixed admissible H. Precomputes the generic per-prime
// log factor once; ratio(m) then only revisits primes dividing some m - h_i.
class SeriesRatio {
public:
    // Throws std::invalid_argument if the tuple is inadmissible.
    SeriesRatio(KTuple tuple, std::uint64_t p0);

    const KTuple& tuple() const noexcept { return tuple_; }
    std::uint64_t truncation_prime() const noexcept { return p0_; }

    // S(H u {m}) / S(H), both truncated at p0. Returns exactly 1 for m in H
    // and 0 when the union is inadmissible. Throws std::invalid_argument if
    // p0 < min_truncation(H u {m}).
    double ratio(std::uint64_t m) const;

private:
    KTuple tuple_;
    std::uint64_t p0_;
    std::vector<std::uint32_t> primes_;       // primes <= p0
    std::vector<double> correction_;          // log((p - nu)/(p - nu - 1)); 0 for critical p
    std::vector<std::uint32_t> critical_;     // primes with nu_p(H) = p - 1
    double generic_log_;                      // sum of log factors assuming nu grows by one
};

double series_ratio(const KTuple& tuple, std::uint64_t m, std::uint64_t p0);

// Mean of series_ratio(H, m) over the len + 1 integers m in [M, M + len],
// summed in ascending m with compensated summation.
double windowed_average(const KTuple& tuple, std::uint64_t first_m, std::uint64_t len,
                        std::uint64_t p0, Parallelism par = {});

// Per-m ratios for the same window, for CSV dumps.
std::vector<double> windowed_ratios(const KTuple& tuple, std::uint64_t first_m,
                                    std::uint64_t len, std::uint64_t p0, Parallelism par = {});

} // namespace maillet
