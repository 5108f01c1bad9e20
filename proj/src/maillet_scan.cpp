#include "maillet/maillet_scan.hpp"

#include "maillet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace maillet {

namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

} // namespace

bool Witness::valid() const noexcept {
    if (!maillet::is_prime(p) || !maillet::is_prime(q)) return false;
    if (kind == WitnessKind::goldbach) return p <= kMax - q && p + q == n;
    return p > q && p - q == n;
}

std::optional<Witness> is_goldbach(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("is_goldbach: need n >= 2");
    for (std::uint64_t q = 2; q <= n / 2; q = (q == 2) ? 3 : q + 2) {
        if (is_prime(q) && is_prime(n - q)) return Witness{n, n - q, q, WitnessKind::goldbach};
        // n odd: q odd makes n - q even and > 2.
        if (n % 2 == 1) break;
    }
    return std::nullopt;
}

std::optional<Witness> is_maillet(std::uint64_t n, std::uint64_t bound) {
    if (n < 1) throw std::invalid_argument("is_maillet: need n >= 1");
    if (bound < 2) throw std::invalid_argument("is_maillet: need bound >= 2");
    if (n > kMax - bound) throw OverflowError("is_maillet: n + bound");
    for (std::uint64_t q = 2; q <= bound; q = (q == 2) ? 3 : q + 2) {
        if (is_prime(q) && is_prime(q + n)) return Witness{n, q + n, q, WitnessKind::maillet};
        // Odd n: any odd q gives an even q + n > 2.
        if (n % 2 == 1) break;
    }
    return std::nullopt;
}

ScanReport scan_interval(std::uint64_t x, std::uint64_t len, std::uint64_t bound, Parity parity,
                         bool keep_witnesses, Parallelism par) {
    if (bound < 2) throw std::invalid_argument("scan_interval: need bound >= 2");
    if (bound > std::numeric_limits<std::uint32_t>::max())
        throw DomainError("scan_interval: bound above 2^32 is not supported");
    if (x > kMax - len || x + len > kMax - bound) throw OverflowError("scan_interval: x + len + bound");

    ScanReport report{{x, x + len}, bound, parity, 0, 0, {}, {}};
    std::uint64_t first = std::max<std::uint64_t>(x, 1);
    if (parity == Parity::even && first % 2 == 1) ++first;
    const std::uint64_t last = x + len;
    if (first > last) return report;

    const auto qs = small_primes(static_cast<std::uint32_t>(bound));
    const auto ps = sieve_segment(first + 2, std::max(last + bound, first + 3));
    const std::uint64_t step = parity == Parity::even ? 2 : 1;
    const std::uint64_t total = (last - first) / step + 1;

    struct Partial {
        std::uint64_t represented = 0;
        std::vector<std::uint64_t> exceptions;
        std::vector<Witness> witnesses;
    };
    constexpr std::uint64_t kChunk = 4096;
    std::vector<Partial> partials(static_cast<std::size_t>((total + kChunk - 1) / kChunk));
    for_each_chunk(partials.size(), par, [&](std::size_t c) {
        Partial& part = partials[c];
        const std::uint64_t end = std::min(total, (c + 1) * kChunk);
        for (std::uint64_t i = c * kChunk; i < end; ++i) {
            const std::uint64_t n = first + i * step;
            std::optional<std::uint64_t> found;
            for (std::uint32_t q : qs) {
                if (ps.is_prime(n + q)) {
                    found = q;
                    break;
                }
                if (n % 2 == 1) break;
            }
            if (!found) {
                part.exceptions.push_back(n);
                continue;
            }
            ++part.represented;
            if (keep_witnesses) part.witnesses.push_back({n, n + *found, *found, WitnessKind::maillet});
        }
    });

    report.scanned = total;
    for (auto& part : partials) {
        report.represented += part.represented;
        report.exceptions.insert(report.exceptions.end(), part.exceptions.begin(), part.exceptions.end());
        report.witnesses.insert(report.witnesses.end(), part.witnesses.begin(), part.witnesses.end());
    }
    return report;
}

std::uint64_t polignac_count(std::uint64_t d, std::uint64_t x) {
    if (d == 0 || (d != 1 && d % 2 == 1))
        throw std::invalid_argument("polignac_count: d must be 1 or even");
    if (x < 3) throw std::invalid_argument("polignac_count: need x >= 3");
    std::uint64_t count = 0;
    std::uint64_t prev = 0;
    sieve_segment(0, x).for_each_prime([&](std::uint64_t p) {
        if (prev != 0 && p - prev == d) ++count;
        prev = p;
    });
    return count;
}

std::uint64_t GapHistogram::mass() const noexcept {
    std::uint64_t m = 0;
    for (std::uint64_t c : counts) m += c;
    return m;
}

GapHistogram normalized_gap_histogram(std::uint64_t lo, std::uint64_t hi, double bin_width,
                                      GapNormalizer normalizer) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("normalized_gap_histogram: need bin_width > 0");
    const auto pairs = gaps(lo, hi);

    GapHistogram h{bin_width, normalizer, {}, {}, 0, 0.0};
    h.samples.reserve(pairs.size());
    // Index of the first pair's lower prime, for the log n normalizer.
    std::uint64_t index = pairs.empty() || normalizer == GapNormalizer::log_p
                              ? 0
                              : prime_count(pairs.front().p);
    for (const auto& [p, q] : pairs) {
        const double denom = std::log(static_cast<double>(normalizer == GapNormalizer::log_p ? p : index));
        ++index;
        if (!(denom > 0.0)) {
            ++h.skipped;
            continue;
        }
        const double s = static_cast<double>(q - p) / denom;
        h.samples.push_back(s);
        h.max_sample = std::max(h.max_sample, s);
        const auto bin = static_cast<std::size_t>(std::floor(s / bin_width));
        if (bin >= h.counts.size()) h.counts.resize(bin + 1, 0);
        ++h.counts[bin];
    }
    return h;
}

} // namespace maillet
