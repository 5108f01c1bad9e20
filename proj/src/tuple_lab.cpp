#include "maillet/tuple_lab.hpp"

#include "maillet/errors.hpp"
#include "maillet/prime_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace maillet {

namespace {

using u128 = unsigned __int128;
constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

// Residue occupancy for every prime p <= k; supports the incremental
// "does adding c keep the tuple admissible" test used by both greedy scans.
class ResidueBoard {
public:
    explicit ResidueBoard(std::size_t k) {
        for (std::uint32_t p : small_primes(static_cast<std::uint32_t>(std::max<std::size_t>(k, 2)))) {
            primes_.push_back(p);
            occupied_.emplace_back(p, false);
            covered_.push_back(0);
        }
    }

    bool accepts(std::uint64_t c) const {
        for (std::size_t j = 0; j < primes_.size(); ++j) {
            const std::uint32_t p = primes_[j];
            if (!occupied_[j][c % p] && covered_[j] + 1 >= p) return false;
        }
        return true;
    }

    void add(std::uint64_t c) {
        for (std::size_t j = 0; j < primes_.size(); ++j) {
            const std::size_t r = c % primes_[j];
            if (!occupied_[j][r]) {
                occupied_[j][r] = true;
                ++covered_[j];
            }
        }
    }

private:
    std::vector<std::uint32_t> primes_;
    std::vector<std::vector<bool>> occupied_;
    std::vector<std::uint32_t> covered_;
};

std::optional<std::uint64_t> checked_pow(std::uint64_t base, unsigned exp) {
    u128 acc = 1;
    for (unsigned i = 0; i < exp; ++i) {
        acc *= base;
        if (acc > kMax) return std::nullopt;
    }
    return static_cast<std::uint64_t>(acc);
}

// floor(n^(1/m)), exact.
std::uint64_t integer_root(std::uint64_t n, unsigned m) {
    if (m == 1) return n;
    auto r = static_cast<std::uint64_t>(std::pow(static_cast<long double>(n), 1.0L / m));
    auto fits = [&](std::uint64_t x) {
        auto v = checked_pow(x, m);
        return v && *v <= n;
    };
    while (r > 0 && !fits(r)) --r;
    while (fits(r + 1)) ++r;
    return r;
}

// 1/eps when it is an integer to within rounding of the decimal input.
std::optional<unsigned> reciprocal_integer(double eps) {
    const double inv = 1.0 / eps;
    const double rounded = std::round(inv);
    if (rounded <= 64 && std::fabs(inv - rounded) <= 1e-12 * rounded)
        return static_cast<unsigned>(rounded);
    return std::nullopt;
}

std::uint64_t floor_power(std::uint64_t h, double eps) {
    if (auto m = reciprocal_integer(eps)) return integer_root(h, *m);
    const long double e = eps;
    auto w = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<long double>(h), e)));
    while (w > 0 && std::pow(static_cast<long double>(w), 1.0L / e) > h) --w;
    while (std::pow(static_cast<long double>(w + 1), 1.0L / e) <= h) ++w;
    return w;
}

// Least integer H with H^eps > x.
std::uint64_t least_exceeding(std::uint64_t x, double eps) {
    if (auto m = reciprocal_integer(eps)) {
        auto v = checked_pow(x, *m);
        if (!v || *v == kMax) throw OverflowError("interval_system: H_nu past 2^64");
        return *v + 1;
    }
    const long double e = eps;
    const long double guess = std::pow(static_cast<long double>(x), 1.0L / e);
    if (!(guess < 1.8e19L)) throw OverflowError("interval_system: H_nu past 2^64");
    auto h = static_cast<std::uint64_t>(std::floor(guess));
    while (h > 1 && std::pow(static_cast<long double>(h - 1), e) > x) --h;
    while (!(std::pow(static_cast<long double>(h), e) > x)) {
        if (h == kMax) throw OverflowError("interval_system: H_nu past 2^64");
        ++h;
    }
    return h;
}

IntervalEntry make_entry(std::uint64_t base, double eps) {
    const std::uint64_t width = floor_power(base, eps);
    if (base > kMax - width) throw OverflowError("interval_system: H_nu + H_nu^eps");
    const std::uint64_t half = width / 2 + width % 2;
    return {base, width, {base, base + width}, {base + half, base + width}};
}

} // namespace

KTuple::KTuple(std::vector<std::uint64_t> offsets) : offsets_(std::move(offsets)) {
    if (offsets_.empty()) throw std::invalid_argument("KTuple: need at least one offset");
    for (std::size_t i = 1; i < offsets_.size(); ++i)
        if (offsets_[i] <= offsets_[i - 1])
            throw std::invalid_argument("KTuple: offsets must be strictly increasing");
}

KTuple KTuple::from_unsorted(std::vector<std::uint64_t> offsets) {
    std::sort(offsets.begin(), offsets.end());
    return KTuple(std::move(offsets));
}

bool KTuple::contains(std::uint64_t h) const noexcept {
    return std::binary_search(offsets_.begin(), offsets_.end(), h);
}

KTuple KTuple::with(std::uint64_t h) const {
    if (contains(h)) return *this;
    auto v = offsets_;
    v.insert(std::upper_bound(v.begin(), v.end(), h), h);
    return KTuple(std::move(v));
}

KTuple KTuple::shifted(std::uint64_t c) const {
    if (offsets_.back() > kMax - c) throw OverflowError("KTuple::shifted");
    auto v = offsets_;
    for (auto& h : v) h += c;
    return KTuple(std::move(v));
}

std::size_t residues_covered(const KTuple& tuple, std::uint64_t p) {
    if (!is_prime(p))
        throw std::invalid_argument("residues_covered: " + std::to_string(p) + " is not prime");
    if (p > tuple.diameter()) return tuple.k();
    std::vector<std::uint64_t> r;
    r.reserve(tuple.k());
    for (std::uint64_t h : tuple.offsets()) r.push_back(h % p);
    std::sort(r.begin(), r.end());
    return static_cast<std::size_t>(std::unique(r.begin(), r.end()) - r.begin());
}

bool is_admissible(const KTuple& tuple) {
    const auto k = static_cast<std::uint32_t>(std::min<std::size_t>(tuple.k(), kMax >> 32));
    for (std::uint32_t p : small_primes(k))
        if (residues_covered(tuple, p) >= p) return false;
    return true;
}

std::uint64_t k_from_epsilon(double eps) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw std::invalid_argument("k_from_epsilon: eps must lie in (0, 1]");
    const double q = 6.0 / eps;
    const double sq = q * q;
    if (!(sq < 1.8e19)) throw OverflowError("k_from_epsilon: k past 2^64");
    const double nearest = std::round(sq);
    if (std::fabs(sq - nearest) <= 1e-9 * nearest) return static_cast<std::uint64_t>(nearest);
    return static_cast<std::uint64_t>(std::ceil(sq));
}

KTuple greedy_admissible(std::size_t k, std::span<const std::uint64_t> candidates) {
    if (k == 0) throw std::invalid_argument("greedy_admissible: k must be >= 1");
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i] <= candidates[i - 1])
            throw std::invalid_argument("greedy_admissible: candidates must be strictly increasing");

    ResidueBoard board(k);
    std::vector<std::uint64_t> kept;
    for (std::uint64_t c : candidates) {
        if (!board.accepts(c)) continue;
        board.add(c);
        kept.push_back(c);
        if (kept.size() == k) return KTuple(std::move(kept));
    }
    throw DomainError("greedy_admissible: candidates exhausted after accepting " +
                      std::to_string(kept.size()) + " of " + std::to_string(k));
}

IntervalSystem interval_system(double eps, std::uint64_t h1, std::size_t count) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw std::invalid_argument("interval_system: eps must lie in (0, 1]");
    if (h1 < 2) throw std::invalid_argument("interval_system: need H_1 >= 2");
    if (count == 0) throw std::invalid_argument("interval_system: need count >= 1");

    IntervalSystem sys{eps, {}};
    sys.entries.reserve(count);
    sys.entries.push_back(make_entry(h1, eps));
    while (sys.entries.size() < count) {
        const std::uint64_t prev = sys.entries.back().base;
        if (prev > kMax / 2) throw OverflowError("interval_system: 2 H_nu");
        sys.entries.push_back(make_entry(least_exceeding(2 * prev, eps), eps));
    }
    return sys;
}

KTuple pick_tuple_in_windows(const IntervalSystem& system, std::size_t k) {
    if (k == 0) throw std::invalid_argument("pick_tuple_in_windows: k must be >= 1");
    if (system.entries.size() < k)
        throw std::invalid_argument("pick_tuple_in_windows: system has " +
                                    std::to_string(system.entries.size()) + " entries, need " +
                                    std::to_string(k));

    ResidueBoard board(k);
    std::vector<std::uint64_t> picked;
    picked.reserve(k);
    for (std::size_t nu = 0; nu < k; ++nu) {
        const auto& entry = system.entries[nu];
        std::uint64_t lo = entry.window.lo;
        if (!picked.empty()) {
            if (picked.back() > kMax - entry.base)
                throw OverflowError("pick_tuple_in_windows: spacing bound");
            lo = std::max(lo, picked.back() + entry.base);
        }
        std::optional<std::uint64_t> choice;
        for (std::uint64_t c = lo; c <= entry.window.hi && c >= lo; ++c) {
            if (board.accepts(c)) {
                choice = c;
                break;
            }
        }
        if (!choice)
            throw DomainError("pick_tuple_in_windows: window " + std::to_string(nu + 1) +
                              " [" + std::to_string(entry.window.lo) + ", " +
                              std::to_string(entry.window.hi) + "] admits no offset");
        board.add(*choice);
        picked.push_back(*choice);
    }
    return KTuple(std::move(picked));
}

} // namespace maillet
