#include "maillet/singular_series.hpp"

#include "maillet/errors.hpp"
#include "maillet/prime_engine.hpp"
#include "maillet/summation.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace maillet {

namespace {

// Dusart's pi(x) > x/ln x (1 + 1/ln x) holds from here on.
constexpr std::uint64_t kDusartStart = 599;

// Rounding allowance for a compensated sum of logs: each log1p term carries
// about one ulp of its own magnitude.
double rounding_allowance(const NeumaierSum& s) {
    return 8.0 * DBL_EPSILON * (s.abs_total() + 1.0);
}

std::uint32_t checked_limit(std::uint64_t p0) {
    if (p0 > std::numeric_limits<std::uint32_t>::max())
        throw DomainError("truncation prime " + std::to_string(p0) + " too large to sieve");
    return static_cast<std::uint32_t>(p0);
}

std::size_t count_residues(const KTuple& tuple, std::uint64_t p, std::vector<std::uint64_t>& scratch) {
    if (p > tuple.diameter()) return tuple.k();
    scratch.clear();
    for (std::uint64_t h : tuple.offsets()) scratch.push_back(h % p);
    std::sort(scratch.begin(), scratch.end());
    return static_cast<std::size_t>(std::unique(scratch.begin(), scratch.end()) - scratch.begin());
}

// For p > p0 > diameter every factor is (1 - k/p)(1 - 1/p)^{-k}, whose log is
// -sum_{j>=2} (k^j - k) p^{-j} / j. Termwise (k^j - k)/j <= (k^2 - k)/2 k^{j-2},
// so |log factor| <= (k^2 - k)/2 / p^2 / (1 - k/p0), which vanishes for k = 1.
double tail_log_bound(double k, std::uint64_t p0) {
    const double ratio = k / static_cast<double>(p0);
    return (k * k - k) / 2.0 * prime_reciprocal_square_tail(p0) / (1.0 - ratio);
}

} // namespace

double SeriesValue::lower() const noexcept { return value * std::exp(-tail_bound); }
double SeriesValue::upper() const noexcept { return value * std::exp(tail_bound); }

std::uint64_t min_truncation(const KTuple& tuple) {
    return std::max<std::uint64_t>(2 * tuple.k(), tuple.diameter() + 1);
}

double prime_reciprocal_square_tail(std::uint64_t x) {
    if (x < 2) throw std::invalid_argument("prime_reciprocal_square_tail: need x >= 2");
    // Partial summation with Dusart's bounds on pi(t):
    //   sum_{p>x} p^-2 = -pi(x)/x^2 + 2 int_x^inf pi(t)/t^3 dt
    //                 <= (1 + 1.5524/ln x) / (x ln x)            (x >= 599)
    auto dusart = [](double t) {
        const double l = std::log(t);
        return (1.0 + 1.5524 / l) / (t * l);
    };
    if (x >= kDusartStart) return dusart(static_cast<double>(x));
    NeumaierSum s;
    for (std::uint32_t p : small_primes(static_cast<std::uint32_t>(kDusartStart)))
        if (p > x) s.add(1.0 / (static_cast<double>(p) * p));
    s.add(dusart(static_cast<double>(kDusartStart)));
    return s.value() * (1.0 + 4.0 * DBL_EPSILON);
}

SeriesValue singular_series(const KTuple& tuple, std::uint64_t p0) {
    const std::uint64_t need = min_truncation(tuple);
    if (p0 < need)
        throw std::invalid_argument("singular_series: truncation prime " + std::to_string(p0) +
                                    " below required " + std::to_string(need));
    const auto k = static_cast<double>(tuple.k());
    std::vector<std::uint64_t> scratch;
    NeumaierSum log_sum;
    for (std::uint32_t p : small_primes(checked_limit(p0))) {
        const std::size_t nu = count_residues(tuple, p, scratch);
        if (nu >= p) return {0.0, p0, 0.0};
        const double pd = p;
        log_sum.add(-k * std::log1p(-1.0 / pd));
        log_sum.add(std::log1p(-static_cast<double>(nu) / pd));
    }
    const double tail = tail_log_bound(k, p0) + rounding_allowance(log_sum);
    return {std::exp(log_sum.value()), p0, tail};
}

double c1_lower_bound(std::uint64_t k, std::uint64_t p0) {
    if (k == 0) throw std::invalid_argument("c1_lower_bound: need k >= 1");
    if (p0 <= 2 * k) throw std::invalid_argument("c1_lower_bound: need p0 > 2k");
    const auto kd = static_cast<double>(k);
    NeumaierSum log_sum;
    for (std::uint32_t p : small_primes(checked_limit(p0))) {
        const double pd = p;
        if (p <= 2 * k) {
            log_sum.add(-std::log(pd));
        } else {
            log_sum.add(std::log1p(-kd / pd));
            log_sum.add(-kd * std::log1p(-1.0 / pd));
        }
    }
    // Every omitted factor is <= 1, so subtracting the tail keeps this a lower bound.
    const double tail = tail_log_bound(kd, p0) + rounding_allowance(log_sum);
    return std::exp(log_sum.value() - tail);
}

SeriesRatio::SeriesRatio(KTuple tuple, std::uint64_t p0)
    : tuple_(std::move(tuple)), p0_(p0), generic_log_(0.0) {
    if (!is_admissible(tuple_))
        throw std::invalid_argument("series_ratio: H must be admissible");
    primes_ = small_primes(checked_limit(p0));
    correction_.reserve(primes_.size());
    std::vector<std::uint64_t> scratch;
    NeumaierSum generic;
    for (std::uint32_t p : primes_) {
        const std::size_t nu = count_residues(tuple_, p, scratch);
        const double pd = p;
        const double keep = -std::log1p(-1.0 / pd);  // union hits no new class
        if (nu + 1 == p) {
            critical_.push_back(p);
            generic.add(keep);
            correction_.push_back(0.0);
            continue;
        }
        const auto nud = static_cast<double>(nu);
        generic.add(std::log1p(-(nud + 1.0) / pd) - std::log1p(-nud / pd) + keep);
        correction_.push_back(-std::log1p(-1.0 / (pd - nud)));
    }
    generic_log_ = generic.value();
}

double SeriesRatio::ratio(std::uint64_t m) const {
    if (tuple_.contains(m)) return 1.0;
    const std::uint64_t lo = std::min(m, tuple_.front());
    const std::uint64_t hi = std::max(m, tuple_.back());
    const std::uint64_t need = std::max<std::uint64_t>(2 * (tuple_.k() + 1), hi - lo + 1);
    if (p0_ < need)
        throw std::invalid_argument("series_ratio: truncation prime " + std::to_string(p0_) +
                                    " below required " + std::to_string(need) + " for m = " +
                                    std::to_string(m));

    // Primes dividing some m - h_i: exactly those where m adds no new class.
    // All of them are <= the union's diameter < p0.
    std::vector<std::uint32_t> divisors;
    for (std::uint64_t h : tuple_.offsets()) {
        std::uint64_t rest = m > h ? m - h : h - m;
        for (std::uint32_t p : primes_) {
            if (static_cast<std::uint64_t>(p) * p > rest) break;
            if (rest % p != 0) continue;
            divisors.push_back(p);
            do rest /= p; while (rest % p == 0);
        }
        if (rest > 1) divisors.push_back(static_cast<std::uint32_t>(rest));
    }
    std::sort(divisors.begin(), divisors.end());
    divisors.erase(std::unique(divisors.begin(), divisors.end()), divisors.end());

    for (std::uint32_t c : critical_)
        if (!std::binary_search(divisors.begin(), divisors.end(), c)) return 0.0;

    NeumaierSum log_ratio;
    log_ratio.add(generic_log_);
    for (std::uint32_t q : divisors) {
        const auto it = std::lower_bound(primes_.begin(), primes_.end(), q);
        log_ratio.add(correction_[static_cast<std::size_t>(it - primes_.begin())]);
    }
    return std::exp(log_ratio.value());
}

double series_ratio(const KTuple& tuple, std::uint64_t m, std::uint64_t p0) {
    return SeriesRatio(tuple, p0).ratio(m);
}

std::vector<double> windowed_ratios(const KTuple& tuple, std::uint64_t first_m, std::uint64_t len,
                                    std::uint64_t p0, Parallelism par) {
    if (first_m > std::numeric_limits<std::uint64_t>::max() - len)
        throw OverflowError("windowed_average: M + len");
    const SeriesRatio engine(tuple, p0);
    // Validate both ends up front so a bad truncation fails before any work.
    engine.ratio(first_m);
    engine.ratio(first_m + len);

    constexpr std::uint64_t kChunk = 1024;
    const std::uint64_t count = len + 1;
    std::vector<double> out(count);
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    for_each_chunk(chunks, par, [&](std::size_t c) {
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(count, begin + kChunk);
        for (std::uint64_t i = begin; i < end; ++i) out[i] = engine.ratio(first_m + i);
    });
    return out;
}

double windowed_average(const KTuple& tuple, std::uint64_t first_m, std::uint64_t len,
                        std::uint64_t p0, Parallelism par) {
    const auto ratios = windowed_ratios(tuple, first_m, len, p0, par);
    return compensated_sum(ratios) / static_cast<double>(ratios.size());
}

} // namespace maillet
