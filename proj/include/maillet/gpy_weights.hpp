#pragma once

// GPY sieve weights
//
//   a_n = Lambda_R(n; H, l)^2,
//   Lambda_R(n; H, l) = 1/(k+l)! sum_{d | P_H(n), d <= R} mu(d) log^{k+l}(R/d),
//   P_H(n) = prod_i (n + h_i),
//
// the window sums A = sum a_n and S(h) = sum a_n chi_P(n + h) over
// n in [N, N + span] (span = N gives the usual n ~ N range), the main terms
// they are compared against, and the ledger for the D0/D1 split argument.
//
// Lambda is evaluated as scale * sum mu(d) (1 - log d / log R)^{k+l} with
// scale = log^{k+l} R / (k+l)! carried separately, so large k + l never
// overflows the inner sum.

#include "maillet/parallel.hpp"
#include "maillet/singular_series.hpp"
#include "maillet/summation.hpp"
#include "maillet/tuple_lab.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace maillet {

struct SieveParams {
    KTuple tuple;
    std::uint64_t ell;
    std::uint64_t N;
    std::uint64_t R;
    std::uint64_t span;  // sums run over n in [N, N + span]
    std::uint64_t T;     // ledger window length
    std::uint64_t p0;    // truncation prime for S(H) in main terms

    std::size_t k() const noexcept { return tuple.k(); }
    double L() const noexcept { return std::log(static_cast<double>(N)); }
};

struct ParamChoices {
    std::optional<std::uint64_t> ell;    // default floor(sqrt(k)/2)
    std::optional<std::uint64_t> R;      // explicit level
    std::optional<double> r_exponent;    // R = floor(N^e); used when R is absent
    std::optional<std::uint64_t> span;   // default N
    std::optional<std::uint64_t> T;      // default 0 (no ledger window)
    std::optional<std::uint64_t> p0;     // default max(10^6, min_truncation(H))
};

// Resolves defaults: l = floor(sqrt(k)/2), R = floor(N exp(-sqrt(log N))).
// Throws std::invalid_argument unless N >= 1, 1 <= R <= N, l <= k and H is
// admissible; OverflowError if n + h_k can leave the 64-bit range.
SieveParams make_params(KTuple tuple, std::uint64_t N, const ParamChoices& choices = {});

// floor(x), except values within 1e-9 relative of an integer snap to it
// (N^(1/3) for N = 10^6 is 99.99999999999997 in binary).
std::uint64_t snapped_floor(double x);

// Positive quantity stored as its natural log.
struct LogValue {
    double log_abs;
    int sign;
    double value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

// B = C(2l, l) N log^{k+2l} R / (k+2l)!.
LogValue analytic_B(const SieveParams& params);

// Weight evaluator for a fixed parameter set. Thread-safe for concurrent
// fill() calls, each with its own scratch.
class WeightSieve {
public:
    explicit WeightSieve(const SieveParams& params);

    struct Scratch {
        std::vector<std::uint32_t> counts;
        std::vector<std::uint32_t> starts;
        std::vector<std::uint32_t> prime_index;
    };

    // out[i] = a_{first + i}. Factors the chunk with a residue-class sieve
    // over the primes <= R.
    void fill(std::uint64_t first, std::span<double> out, Scratch& scratch) const;

    // a_n by trial division; independent of fill().
    double weight(std::uint64_t n) const;

    // sum_{d | D, d <= R} mu(d) (1 - log d / log R)^{k+l}, D squarefree with
    // prime factors primes()[i] for the ascending indices given.
    double normalized_lambda(std::span<const std::uint32_t> prime_indices) const;

    double scale() const noexcept { return scale_; }
    std::span<const std::uint32_t> primes() const noexcept { return primes_; }
    std::span<const double> logs() const noexcept { return logs_; }
    std::span<const std::uint32_t> residues(std::size_t prime_index) const noexcept {
        return std::span<const std::uint32_t>(residues_).subspan(
            residue_start_[prime_index], residue_start_[prime_index + 1] - residue_start_[prime_index]);
    }

private:
    void accumulate(std::span<const std::uint32_t> idx, std::size_t start, std::uint64_t d,
                    double log_d, bool negative, NeumaierSum& sum) const;

    std::vector<std::uint64_t> offsets_;
    std::uint64_t R_;
    unsigned power_;  // k + l
    double log_R_;
    double scale_;
    std::vector<std::uint32_t> primes_;                // primes <= R
    std::vector<double> logs_;
    std::vector<std::uint32_t> residue_start_;         // CSR into residues_
    std::vector<std::uint32_t> residues_;              // distinct (-h_i) mod p
};

double weight(std::uint64_t n, const SieveParams& params);

inline constexpr std::uint64_t kWeightChunk = std::uint64_t{1} << 14;

// Evaluates fn(first_n, weights) for fixed-width chunks of [N, N + span] in
// parallel and returns the per-chunk results in ascending order. Chunking is
// independent of the worker count.
template <class Partial, class Fn>
std::vector<Partial> map_weight_chunks(const SieveParams& params, Parallelism par, Fn&& fn) {
    const WeightSieve sieve(params);
    const std::uint64_t count = params.span + 1;
    const std::size_t chunks = static_cast<std::size_t>((count + kWeightChunk - 1) / kWeightChunk);
    std::vector<Partial> out(chunks);
    for_each_chunk(chunks, par, [&](std::size_t c) {
        thread_local WeightSieve::Scratch scratch;
        thread_local std::vector<double> weights;
        const std::uint64_t begin = c * kWeightChunk;
        const std::uint64_t len = std::min(kWeightChunk, count - begin);
        weights.resize(len);
        sieve.fill(params.N + begin, weights, scratch);
        out[c] = fn(params.N + begin, std::span<const double>(weights));
    });
    return out;
}

enum class SumStrategy { per_n, divisor_swap };

// Throws DomainError if divisor_swap would need more than kMaxSwapPairs
// (d1, d2) pairs.
inline constexpr std::uint64_t kMaxSwapPairs = std::uint64_t{1} << 27;
double sum_A(const SieveParams& params, SumStrategy strategy, Parallelism par = {});

// sum_{n in [N, N+span]} a_n chi_P(n + h0). Requires h0 <= 4N.
double sum_prime_shift(const SieveParams& params, std::uint64_t h0, Parallelism par = {});

struct OffsetShiftRow {
    std::uint64_t h;
    double S_i;
    double S_i_over_A;
    double level_free_prediction;  // (2l+1)/(2l+2) * S(H) B / (k+2l+1)
    double gpy_prediction;      // S(H) B * 2(2l+1)/(l+1) * log R / ((k+2l+1) log N)
    double ratio_level_free;
    double ratio_gpy;
};

struct ExternalShiftRow {
    std::uint64_t h0;
    double S_0;
    double series_union;        // S(H u {h0}), 0 if inadmissible
    double prediction;          // S(H u {h0}) B / L
    double ratio;               // S_0 / prediction (0 when prediction is 0)
};

struct RatioReport {
    double A;
    LogValue B;
    SeriesValue series;
    double ratio_A;             // A / (S(H) B)
    std::vector<OffsetShiftRow> offsets;
    std::vector<ExternalShiftRow> shifts;
};

// Single pass over the window computing A, every S_i and S_0(h0).
// Each h0 must be <= 4N; values inside H are reported as offsets, not shifts.
RatioReport ratio_report(const SieveParams& params, std::span<const std::uint64_t> h0s,
                         Parallelism par = {});

struct LedgerReport {
    IntegerInterval window;     // m ranges over [window.lo, window.hi]
    double series;              // S(H)
    double B;
    double A;
    double A0;                  // sum over D0
    double A1;                  // sum over D1
    double sum_S_i;             // sum_i S(h_i)
    double inclusion_exclusion_gap;  // (A - sum_S_i) - A0
    std::uint64_t multi_prime_count; // n with two or more prime shifts
    bool single_prime_identity_applies;
    double A0_bound;            // 7 S(H) B / (3 sqrt k)
    double S;                   // sum_{n in D0} a_n sum_m chi_P(n + m)
    double S_swapped;           // same sum, m outer
    double S_full_swapped;      // sum_m sum_{all n} a_n chi_P(n + m)
    double S_lhs_bound;         // A0 * 2T / log T
    double S_rhs_main;          // 5 S(H) B T / (6 L)
    bool lhs_bound_holds;       // S <= S_lhs_bound
    bool rhs_main_exceeded;     // S > S_rhs_main
    std::uint64_t D0_size;
    std::uint64_t D1_size;
};

// Requires window length T = window.hi - window.lo >= 3.
LedgerReport contradiction_ledger(const SieveParams& params, IntegerInterval window,
                                  Parallelism par = {});

} // namespace maillet
