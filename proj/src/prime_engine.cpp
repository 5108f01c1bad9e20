#include "maillet/prime_engine.hpp"

#include "maillet/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace maillet {

namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept {
    std::uint64_t result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

bool strong_probable_prime(std::uint64_t n, std::uint64_t a) noexcept {
    std::uint64_t d = n - 1;
    const int r = std::countr_zero(d);
    d >>= r;
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < r; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

constexpr std::uint64_t kCountWindow = std::uint64_t{1} << 26;

} // namespace

std::uint64_t isqrt(std::uint64_t n) noexcept {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::vector<std::uint32_t> small_primes(std::uint32_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i * i <= limit; ++i)
        if (!composite[i])
            for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    for (std::uint32_t i = 2; i <= limit; ++i)
        if (!composite[i]) out.push_back(i);
    return out;
}

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    static constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t p : kBases) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 41 * 41) return true;
    // These twelve bases are deterministic for n < 3.3e24.
    for (std::uint64_t a : kBases)
        if (!strong_probable_prime(n, a)) return false;
    return true;
}

std::uint64_t next_prime(std::uint64_t n) {
    constexpr std::uint64_t kLastPrime = 18446744073709551557ULL;
    if (n >= kLastPrime) throw OverflowError("no prime above " + std::to_string(n));
    std::uint64_t c = n + 1;
    while (!is_prime(c)) ++c;
    return c;
}

PrimeTable::PrimeTable(std::uint64_t lo, std::uint64_t hi)
    : lo_(lo), hi_(hi), first_odd_(lo | 1), odd_count_(0) {
    if (first_odd_ <= hi_) {
        const std::uint64_t last_odd = (hi_ & 1) ? hi_ : hi_ - 1;
        odd_count_ = (last_odd - first_odd_) / 2 + 1;
    }
    words_.assign((odd_count_ + 63) / 64, ~std::uint64_t{0});
    if (odd_count_ % 64 != 0) words_.back() = (std::uint64_t{1} << (odd_count_ % 64)) - 1;
}

bool PrimeTable::is_prime(std::uint64_t n) const {
    if (!contains(n))
        throw std::out_of_range("PrimeTable: " + std::to_string(n) + " outside [" +
                                std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
    if (n == 2) return true;
    if ((n & 1) == 0) return false;
    const std::uint64_t i = (n - first_odd_) / 2;
    return (words_[i / 64] >> (i % 64)) & 1;
}

std::uint64_t PrimeTable::count() const noexcept {
    std::uint64_t c = (lo_ <= 2 && hi_ >= 2) ? 1 : 0;
    for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
}

std::vector<std::uint64_t> PrimeTable::primes() const {
    std::vector<std::uint64_t> out;
    out.reserve(count());
    for_each_prime([&](std::uint64_t p) { out.push_back(p); });
    return out;
}

PrimeTable sieve_segment(std::uint64_t lo, std::uint64_t hi, const SieveOptions& options) {
    if (lo >= hi)
        throw std::invalid_argument("sieve_segment: need lo < hi, got [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "]");
    if (hi - lo >= options.max_span)
        throw DomainError("sieve_segment: span " + std::to_string(hi - lo) +
                          " exceeds memory cap " + std::to_string(options.max_span));

    PrimeTable table(lo, hi);
    if (table.odd_count_ == 0) return table;
    auto& words = table.words_;
    const auto clear_bit = [&](std::uint64_t i) { words[i / 64] &= ~(std::uint64_t{1} << (i % 64)); };
    if (table.first_odd_ == 1) clear_bit(0);

    const std::uint64_t root = isqrt(hi);
    const auto base = small_primes(static_cast<std::uint32_t>(root));

    // next[j]: bit index of the next odd multiple of base[j + 1] still to clear.
    std::vector<std::uint64_t> next;
    std::vector<std::uint64_t> step;
    for (std::uint32_t p : base) {
        if (p == 2) continue;
        const std::uint64_t start = std::max<std::uint64_t>(std::uint64_t{p} * p, table.first_odd_);
        u128 m = (static_cast<u128>(start) + p - 1) / p * p;
        if ((m & 1) == 0) m += p;
        if (m > hi) continue;
        next.push_back(static_cast<std::uint64_t>((m - table.first_odd_) / 2));
        step.push_back(p);
    }

    const std::uint64_t seg_bits = std::max<std::uint64_t>(64, options.segment_width / 2);
    for (std::uint64_t seg_end = 0; seg_end < table.odd_count_;) {
        seg_end = std::min(table.odd_count_, seg_end + seg_bits);
        for (std::size_t j = 0; j < next.size(); ++j) {
            std::uint64_t i = next[j];
            for (; i < seg_end; i += step[j]) clear_bit(i);
            next[j] = i;
        }
    }
    return table;
}

std::uint64_t prime_count(std::uint64_t x, const SieveOptions& options) {
    if (x < 2) return 0;
    std::uint64_t total = 0;
    for (std::uint64_t lo = 0;;) {
        const std::uint64_t hi = (x - lo <= kCountWindow) ? x : lo + kCountWindow - 1;
        total += (hi == lo) ? (is_prime(lo) ? 1 : 0) : sieve_segment(lo, hi, options).count();
        if (hi == x) break;
        lo = hi + 1;
    }
    return total;
}

std::uint64_t nth_prime(std::uint64_t i, const SieveOptions& options) {
    if (i == 0) throw std::invalid_argument("nth_prime: index starts at 1");
    // p_i < i (log i + log log i) for i >= 6 (Rosser); sizes the first window.
    std::uint64_t width = kCountWindow;
    if (i < 6) {
        width = 16;
    } else {
        const double li = std::log(static_cast<double>(i));
        const double estimate = static_cast<double>(i) * (li + std::log(li)) + 16;
        if (estimate < static_cast<double>(kCountWindow)) width = static_cast<std::uint64_t>(estimate);
    }
    std::uint64_t seen = 0;
    for (std::uint64_t lo = 0;; lo += width, width = kCountWindow) {
        if (lo > std::numeric_limits<std::uint64_t>::max() - width)
            throw OverflowError("nth_prime(" + std::to_string(i) + ")");
        const auto table = sieve_segment(lo, lo + width - 1, options);
        const std::uint64_t here = table.count();
        if (seen + here < i) {
            seen += here;
            continue;
        }
        std::uint64_t found = 0;
        table.for_each_prime([&](std::uint64_t p) {
            if (++seen == i) found = p;
        });
        return found;
    }
}

std::vector<PrimePair> gaps(std::uint64_t lo, std::uint64_t hi, const SieveOptions& options) {
    if (lo >= hi) throw std::invalid_argument("gaps: need lo < hi");
    std::vector<std::uint64_t> ps;
    if (hi - lo == 1) {
        if (is_prime(lo)) ps.push_back(lo);
    } else {
        ps = sieve_segment(lo, hi - 1, options).primes();
    }
    std::vector<PrimePair> out;
    if (ps.empty()) return out;
    out.reserve(ps.size());
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) out.push_back({ps[i], ps[i + 1]});
    out.push_back({ps.back(), next_prime(ps.back())});
    return out;
}

BrunTitchmarshCheck bt_check(std::uint64_t x, std::uint64_t y, const SieveOptions& options) {
    if (x < 1) throw std::invalid_argument("bt_check: need x >= 1");
    if (y < 3) throw std::invalid_argument("bt_check: need y >= 3 (2y/log y degenerates below)");
    if (x > std::numeric_limits<std::uint64_t>::max() - y)
        throw OverflowError("bt_check: x + y");
    const std::uint64_t diff = sieve_segment(x + 1, x + y, options).count();
    const double yd = static_cast<double>(y);
    const double bound = 2.0 * yd / std::log(yd);
    return {diff, bound, static_cast<double>(diff) <= bound};
}

} // namespace maillet
