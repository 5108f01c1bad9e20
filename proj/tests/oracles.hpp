#pragma once

// Brute-force reference implementations. Nothing here calls into the library.

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

namespace oracle {

inline bool trial_is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<std::uint64_t> trial_primes(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = lo; n <= hi; ++n)
        if (trial_is_prime(n)) out.push_back(n);
    return out;
}

inline std::vector<bool> eratosthenes(std::uint64_t limit) {
    std::vector<bool> composite(limit + 1, false);
    composite[0] = true;
    if (limit >= 1) composite[1] = true;
    for (std::uint64_t p = 2; p * p <= limit; ++p)
        if (!composite[p])
            for (std::uint64_t m = p * p; m <= limit; m += p) composite[m] = true;
    std::vector<bool> prime(limit + 1);
    for (std::uint64_t n = 0; n <= limit; ++n) prime[n] = !composite[n];
    return prime;
}

// Residue classes mod p hit by the offsets.
inline std::size_t covered(const std::vector<std::uint64_t>& h, std::uint64_t p) {
    std::set<std::uint64_t> r;
    for (auto x : h) r.insert(x % p);
    return r.size();
}

// Checks every prime up to |H| + 1; larger primes cannot be fully covered.
inline bool admissible(const std::vector<std::uint64_t>& h) {
    for (std::uint64_t p = 2; p <= h.size() + 1; ++p)
        if (trial_is_prime(p) && covered(h, p) == p) return false;
    return true;
}

inline std::vector<std::uint64_t> greedy(std::size_t k, std::uint64_t max_candidate) {
    std::vector<std::uint64_t> h;
    for (std::uint64_t c = 0; c <= max_candidate && h.size() < k; ++c) {
        auto t = h;
        t.push_back(c);
        if (admissible(t)) h = t;
    }
    return h;
}

// prod_{p <= p0} (1 - 1/p)^{-k} (1 - nu_p/p) in long double.
inline long double series(const std::vector<std::uint64_t>& h, std::uint64_t p0) {
    const auto prime = eratosthenes(p0);
    const long double k = static_cast<long double>(h.size());
    long double prod = 1.0L;
    for (std::uint64_t p = 2; p <= p0; ++p) {
        if (!prime[p]) continue;
        const long double pl = static_cast<long double>(p);
        const long double nu = static_cast<long double>(covered(h, p));
        prod *= std::pow(1.0L - 1.0L / pl, -k) * (1.0L - nu / pl);
    }
    return prod;
}

// 2 prod_{3 <= p <= limit} (1 - 1/(p-1)^2).
inline long double twice_twin_constant(std::uint64_t limit) {
    const auto prime = eratosthenes(limit);
    long double prod = 2.0L;
    for (std::uint64_t p = 3; p <= limit; p += 2)
        if (prime[p]) {
            const long double q = static_cast<long double>(p - 1);
            prod *= 1.0L - 1.0L / (q * q);
        }
    return prod;
}

inline int mobius(std::uint64_t d) {
    int mu = 1;
    for (std::uint64_t p = 2; p * p <= d; ++p) {
        if (d % p != 0) continue;
        d /= p;
        if (d % p == 0) return 0;
        mu = -mu;
    }
    return d > 1 ? -mu : mu;
}

// Lambda_R(n) = 1/(k+l)! sum_{d | P_H(n), d <= R} mu(d) log^{k+l}(R/d).
inline long double lambda(std::uint64_t n, const std::vector<std::uint64_t>& h, unsigned ell,
                          std::uint64_t R) {
    const unsigned power = static_cast<unsigned>(h.size()) + ell;
    long double sum = 0.0L;
    for (std::uint64_t d = 1; d <= R; ++d) {
        const int mu = mobius(d);
        if (mu == 0) continue;
        std::uint64_t prod = 1 % d;
        for (auto x : h) prod = static_cast<std::uint64_t>(
                             (static_cast<unsigned __int128>(prod) * ((n + x) % d)) % d);
        if (prod != 0) continue;
        sum += mu * std::pow(std::log(static_cast<long double>(R) / static_cast<long double>(d)),
                             static_cast<long double>(power));
    }
    return sum / std::tgamma(static_cast<long double>(power) + 1.0L);
}

inline long double weight(std::uint64_t n, const std::vector<std::uint64_t>& h, unsigned ell,
                          std::uint64_t R) {
    const long double l = lambda(n, h, ell, R);
    return l * l;
}

// sum_{n in [lo, hi]} a_n.
inline long double sum_A(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint64_t>& h,
                         unsigned ell, std::uint64_t R) {
    long double s = 0.0L;
    for (std::uint64_t n = lo; n <= hi; ++n) s += weight(n, h, ell, R);
    return s;
}

// sum_{n in [lo, hi]} a_n chi_P(n + h0).
inline long double sum_shift(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint64_t>& h,
                             unsigned ell, std::uint64_t R, std::uint64_t h0) {
    long double s = 0.0L;
    for (std::uint64_t n = lo; n <= hi; ++n)
        if (trial_is_prime(n + h0)) s += weight(n, h, ell, R);
    return s;
}

// Smallest prime q <= bound with q + n prime, or 0.
inline std::uint64_t maillet_q(std::uint64_t n, std::uint64_t bound) {
    for (std::uint64_t q = 2; q <= bound; ++q)
        if (trial_is_prime(q) && trial_is_prime(q + n)) return q;
    return 0;
}

} // namespace oracle
