#include "maillet/gpy_weights.hpp"

#include "maillet/errors.hpp"
#include "maillet/prime_engine.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace maillet {

namespace {

using u128 = unsigned __int128;
constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

double ipow(double x, unsigned e) noexcept {
    double r = 1.0;
    while (e > 0) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

void require_fits(std::uint64_t a, std::uint64_t b, const char* what) {
    if (a > kMax - b) throw OverflowError(what);
}

// Primality over [lo, hi]; a one-point range is widened so the sieve accepts it.
PrimeTable table_for(std::uint64_t lo, std::uint64_t hi) {
    if (hi <= lo) hi = lo + 1;
    return sieve_segment(lo, hi);
}

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t p) {
    // p prime, a not divisible by p.
    std::uint64_t result = 1, base = a % p, e = p - 2;
    while (e > 0) {
        if (e & 1) result = static_cast<std::uint64_t>(static_cast<u128>(result) * base % p);
        base = static_cast<std::uint64_t>(static_cast<u128>(base) * base % p);
        e >>= 1;
    }
    return result;
}

struct SquarefreeTable {
    std::vector<std::uint64_t> d;
    std::vector<int> mu;
    std::vector<double> w;                  // (1 - log d / log R)^{k+l}
    std::vector<std::uint32_t> factor_start;
    std::vector<std::uint32_t> factors;     // prime indices, ascending per d
};

} // namespace

std::uint64_t snapped_floor(double x) {
    if (!(x >= 0.0) || !(x < 1.8e19)) throw OverflowError("snapped_floor: value out of range");
    const double nearest = std::round(x);
    if (nearest > 0 && std::fabs(x - nearest) <= 1e-9 * nearest)
        return static_cast<std::uint64_t>(nearest);
    return static_cast<std::uint64_t>(std::floor(x));
}

SieveParams make_params(KTuple tuple, std::uint64_t N, const ParamChoices& choices) {
    if (N < 1) throw std::invalid_argument("make_params: need N >= 1");
    if (!is_admissible(tuple)) throw std::invalid_argument("make_params: H must be admissible");
    const std::uint64_t k = tuple.k();
    const std::uint64_t ell = choices.ell.value_or(isqrt(k) / 2);
    if (ell > k) throw std::invalid_argument("make_params: need l <= k");

    const double Nd = static_cast<double>(N);
    std::uint64_t R = 0;
    if (choices.R) {
        R = *choices.R;
    } else if (choices.r_exponent) {
        if (!(*choices.r_exponent > 0.0 && *choices.r_exponent <= 1.0))
            throw std::invalid_argument("make_params: R exponent must lie in (0, 1]");
        R = snapped_floor(std::pow(Nd, *choices.r_exponent));
    } else {
        R = snapped_floor(Nd * std::exp(-std::sqrt(std::log(Nd))));
    }
    if (R < 1 || R > N)
        throw std::invalid_argument("make_params: need 1 <= R <= N, got R = " + std::to_string(R));
    if (R > std::numeric_limits<std::uint32_t>::max())
        throw DomainError("make_params: R above 2^32 is not supported");

    const std::uint64_t span = choices.span.value_or(N);
    require_fits(N, span, "make_params: N + span");
    require_fits(N + span, tuple.back(), "make_params: n + h_k");
    const std::uint64_t p0 = choices.p0.value_or(std::max<std::uint64_t>(1'000'000, min_truncation(tuple)));
    return SieveParams{std::move(tuple), ell, N, R, span, choices.T.value_or(0), p0};
}

LogValue analytic_B(const SieveParams& params) {
    if (params.R < 2) return {-std::numeric_limits<double>::infinity(), 0};
    const double k = static_cast<double>(params.k());
    const double l = static_cast<double>(params.ell);
    const double log_binom = std::lgamma(2 * l + 1) - 2 * std::lgamma(l + 1);
    const double log_b = log_binom + std::log(static_cast<double>(params.N)) +
                         (k + 2 * l) * std::log(std::log(static_cast<double>(params.R))) -
                         std::lgamma(k + 2 * l + 1);
    return {log_b, 1};
}

WeightSieve::WeightSieve(const SieveParams& params)
    : offsets_(params.tuple.offsets().begin(), params.tuple.offsets().end()),
      R_(params.R),
      power_(static_cast<unsigned>(params.k() + params.ell)),
      log_R_(std::log(static_cast<double>(params.R))),
      scale_(0.0) {
    if (R_ >= 2)
        scale_ = std::exp(power_ * std::log(log_R_) - std::lgamma(power_ + 1.0));
    primes_ = small_primes(static_cast<std::uint32_t>(R_));
    logs_.reserve(primes_.size());
    residue_start_.reserve(primes_.size() + 1);
    residue_start_.push_back(0);
    std::vector<std::uint32_t> r;
    for (std::uint32_t p : primes_) {
        logs_.push_back(std::log(static_cast<double>(p)));
        r.clear();
        for (std::uint64_t h : offsets_) r.push_back(static_cast<std::uint32_t>((p - h % p) % p));
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        residues_.insert(residues_.end(), r.begin(), r.end());
        residue_start_.push_back(static_cast<std::uint32_t>(residues_.size()));
    }
}

void WeightSieve::accumulate(std::span<const std::uint32_t> idx, std::size_t start, std::uint64_t d,
                             double log_d, bool negative, NeumaierSum& sum) const {
    const double x = std::max(0.0, 1.0 - log_d / log_R_);
    const double term = ipow(x, power_);
    sum.add(negative ? -term : term);
    for (std::size_t i = start; i < idx.size(); ++i) {
        const std::uint32_t p = primes_[idx[i]];
        if (d > R_ / p) break;  // factors ascend, so every later d * p' exceeds R too
        accumulate(idx, i + 1, d * p, log_d + logs_[idx[i]], !negative, sum);
    }
}

double WeightSieve::normalized_lambda(std::span<const std::uint32_t> prime_indices) const {
    if (R_ < 2) return 0.0;
    NeumaierSum sum;
    accumulate(prime_indices, 0, 1, 0.0, false, sum);
    return sum.value();
}

void WeightSieve::fill(std::uint64_t first, std::span<double> out, Scratch& s) const {
    const std::size_t len = out.size();
    if (R_ < 2) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    auto& counts = s.counts;
    counts.assign(len, 0);
    auto for_each_hit = [&](auto&& visit) {
        for (std::size_t j = 0; j < primes_.size(); ++j) {
            const std::uint64_t p = primes_[j];
            const std::uint64_t base = first % p;
            for (std::uint32_t r : residues(j)) {
                for (std::uint64_t i = (r + p - base) % p; i < len; i += p) visit(i, j);
            }
        }
    };
    for_each_hit([&](std::uint64_t i, std::size_t) { ++counts[i]; });

    auto& starts = s.starts;
    starts.resize(len + 1);
    starts[0] = 0;
    for (std::size_t i = 0; i < len; ++i) starts[i + 1] = starts[i] + counts[i];
    s.prime_index.resize(starts[len]);
    std::copy(starts.begin(), starts.end() - 1, counts.begin());
    for_each_hit([&](std::uint64_t i, std::size_t j) {
        s.prime_index[counts[i]++] = static_cast<std::uint32_t>(j);
    });

    const std::span<const std::uint32_t> all(s.prime_index);
    for (std::size_t i = 0; i < len; ++i) {
        const double lambda = scale_ * normalized_lambda(all.subspan(starts[i], starts[i + 1] - starts[i]));
        out[i] = lambda * lambda;
    }
}

double WeightSieve::weight(std::uint64_t n) const {
    if (R_ < 2) return 0.0;
    std::vector<std::uint32_t> idx;
    for (std::uint64_t h : offsets_) {
        std::uint64_t rest = n + h;
        for (std::size_t j = 0; j < primes_.size(); ++j) {
            const std::uint64_t p = primes_[j];
            if (p * p > rest) break;
            if (rest % p != 0) continue;
            idx.push_back(static_cast<std::uint32_t>(j));
            do rest /= p; while (rest % p == 0);
        }
        if (rest > 1 && rest <= R_) {
            const auto it = std::lower_bound(primes_.begin(), primes_.end(), rest);
            idx.push_back(static_cast<std::uint32_t>(it - primes_.begin()));
        }
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    const double lambda = scale_ * normalized_lambda(idx);
    return lambda * lambda;
}

double weight(std::uint64_t n, const SieveParams& params) {
    if (n < 1) throw std::invalid_argument("weight: need n >= 1");
    return WeightSieve(params).weight(n);
}

namespace {

double sum_A_per_n(const SieveParams& params, Parallelism par) {
    const auto partials = map_weight_chunks<NeumaierSum>(
        params, par, [](std::uint64_t, std::span<const double> w) {
            NeumaierSum s;
            for (double a : w) s.add(a);
            return s;
        });
    NeumaierSum total;
    for (const auto& p : partials) total.merge(p);
    return total.value();
}

SquarefreeTable squarefree_up_to(const WeightSieve& sieve, std::uint64_t R, double log_R, unsigned power) {
    SquarefreeTable t;
    const auto primes = sieve.primes();
    const auto logs = sieve.logs();
    std::vector<std::uint32_t> stack;
    t.factor_start.push_back(0);
    auto visit = [&](auto&& self, std::size_t start, std::uint64_t d, double log_d, int mu) -> void {
        t.d.push_back(d);
        t.mu.push_back(mu);
        t.w.push_back(ipow(std::max(0.0, 1.0 - log_d / log_R), power));
        t.factors.insert(t.factors.end(), stack.begin(), stack.end());
        t.factor_start.push_back(static_cast<std::uint32_t>(t.factors.size()));
        for (std::size_t i = start; i < primes.size(); ++i) {
            if (d > R / primes[i]) break;
            stack.push_back(static_cast<std::uint32_t>(i));
            self(self, i + 1, d * primes[i], log_d + logs[i], -mu);
            stack.pop_back();
        }
    };
    visit(visit, 0, 1, 0.0, 1);
    return t;
}

// #{n in [N, N + span] : n mod p lies in {-h_i mod p} for every p | e}.
class DivisibilityCounter {
public:
    DivisibilityCounter(const SieveParams& params, const WeightSieve& sieve)
        : sieve_(sieve), first_(params.N), length_(params.span + 1) {}

    std::uint64_t count(std::uint64_t e, std::span<const std::uint32_t> prime_indices) {
        if (auto it = cache_.find(e); it != cache_.end()) return it->second;
        std::uint64_t per_period = 1;
        for (std::uint32_t j : prime_indices) per_period *= sieve_.residues(j).size();
        std::uint64_t total = (length_ / e) * per_period;
        const std::uint64_t rem = length_ % e;
        if (rem != 0) {
            // CRT-enumerate one period of solutions and count those falling in
            // the trailing partial period.
            solutions_.assign(1, 0);
            std::uint64_t modulus = 1;
            for (std::uint32_t j : prime_indices) {
                const std::uint64_t p = sieve_.primes()[j];
                const std::uint64_t inv = inverse_mod(modulus % p, p);
                next_.clear();
                for (std::uint64_t x : solutions_) {
                    for (std::uint32_t r : sieve_.residues(j)) {
                        const std::uint64_t t = (r + p - x % p) % p * inv % p;
                        next_.push_back(x + modulus * t);
                    }
                }
                solutions_.swap(next_);
                modulus *= p;
            }
            // Whole periods end at first + (length - rem), which is first mod e.
            const std::uint64_t tail_start = first_ % e;
            for (std::uint64_t s : solutions_)
                if ((s + e - tail_start) % e < rem) ++total;
        }
        cache_.emplace(e, total);
        return total;
    }

private:
    const WeightSieve& sieve_;
    std::uint64_t first_;
    std::uint64_t length_;
    std::unordered_map<std::uint64_t, std::uint64_t> cache_;
    std::vector<std::uint64_t> solutions_;
    std::vector<std::uint64_t> next_;
};

double sum_A_divisor_swap(const SieveParams& params) {
    const WeightSieve sieve(params);
    if (params.R < 2) return 0.0;
    const double log_R = std::log(static_cast<double>(params.R));
    const auto power = static_cast<unsigned>(params.k() + params.ell);
    const auto table = squarefree_up_to(sieve, params.R, log_R, power);
    const std::uint64_t D = table.d.size();
    if (D > kMaxSwapPairs / D)
        throw DomainError("sum_A(divisor_swap): " + std::to_string(D) +
                          " squarefree d <= R give too many pairs; lower R or use per_n");

    DivisibilityCounter counter(params, sieve);
    std::vector<std::uint32_t> merged;
    auto factors_of = [&](std::size_t i) {
        return std::span<const std::uint32_t>(table.factors)
            .subspan(table.factor_start[i], table.factor_start[i + 1] - table.factor_start[i]);
    };

    NeumaierSum total;
    for (std::size_t i = 0; i < D; ++i) {
        if (table.w[i] == 0.0) continue;
        for (std::size_t j = 0; j < D; ++j) {
            if (table.w[j] == 0.0) continue;
            const std::uint64_t g = std::gcd(table.d[i], table.d[j]);
            const std::uint64_t e = table.d[i] / g * table.d[j];
            merged.clear();
            const auto fi = factors_of(i);
            const auto fj = factors_of(j);
            std::set_union(fi.begin(), fi.end(), fj.begin(), fj.end(), std::back_inserter(merged));
            const std::uint64_t cnt = counter.count(e, merged);
            if (cnt == 0) continue;
            const double term = table.w[i] * table.w[j] * static_cast<double>(cnt);
            total.add(table.mu[i] * table.mu[j] > 0 ? term : -term);
        }
    }
    return sieve.scale() * sieve.scale() * total.value();
}

} // namespace

double sum_A(const SieveParams& params, SumStrategy strategy, Parallelism par) {
    return strategy == SumStrategy::per_n ? sum_A_per_n(params, par) : sum_A_divisor_swap(params);
}

double sum_prime_shift(const SieveParams& params, std::uint64_t h0, Parallelism par) {
    if (h0 > 4 * params.N)
        throw std::invalid_argument("sum_prime_shift: need h0 <= 4N");
    require_fits(params.N + params.span, h0, "sum_prime_shift: n + h0");
    const auto primes = table_for(params.N + h0, params.N + params.span + h0);
    const auto partials = map_weight_chunks<NeumaierSum>(
        params, par, [&](std::uint64_t first, std::span<const double> w) {
            NeumaierSum s;
            for (std::size_t i = 0; i < w.size(); ++i)
                if (primes.is_prime(first + i + h0)) s.add(w[i]);
            return s;
        });
    NeumaierSum total;
    for (const auto& p : partials) total.merge(p);
    return total.value();
}

RatioReport ratio_report(const SieveParams& params, std::span<const std::uint64_t> h0s, Parallelism par) {
    std::vector<std::uint64_t> shifts(params.tuple.offsets().begin(), params.tuple.offsets().end());
    const std::size_t k = shifts.size();
    for (std::uint64_t h0 : h0s) {
        if (h0 > 4 * params.N) throw std::invalid_argument("ratio_report: need h0 <= 4N");
        if (!params.tuple.contains(h0) && std::find(shifts.begin() + k, shifts.end(), h0) == shifts.end())
            shifts.push_back(h0);
    }
    const std::uint64_t lo_shift = *std::min_element(shifts.begin(), shifts.end());
    const std::uint64_t hi_shift = *std::max_element(shifts.begin(), shifts.end());
    require_fits(params.N + params.span, hi_shift, "ratio_report: n + h");
    const auto primes = table_for(params.N + lo_shift, params.N + params.span + hi_shift);

    const auto partials = map_weight_chunks<std::vector<NeumaierSum>>(
        params, par, [&](std::uint64_t first, std::span<const double> w) {
            std::vector<NeumaierSum> acc(shifts.size() + 1);
            for (std::size_t i = 0; i < w.size(); ++i) {
                acc[0].add(w[i]);
                for (std::size_t s = 0; s < shifts.size(); ++s)
                    if (primes.is_prime(first + i + shifts[s])) acc[s + 1].add(w[i]);
            }
            return acc;
        });
    std::vector<NeumaierSum> totals(shifts.size() + 1);
    for (const auto& part : partials)
        for (std::size_t s = 0; s < part.size(); ++s) totals[s].merge(part[s]);

    RatioReport report;
    report.A = totals[0].value();
    report.B = analytic_B(params);
    report.series = singular_series(params.tuple, params.p0);
    const double B = report.B.value();
    const double SB = report.series.value * B;
    report.ratio_A = SB > 0 ? report.A / SB : 0.0;

    const double l = static_cast<double>(params.ell);
    const double kd = static_cast<double>(k);
    const double level_free_coef = (2 * l + 1) / (2 * l + 2) / (kd + 2 * l + 1);
    const double gpy_coef = 2 * (2 * l + 1) / (l + 1) * std::log(static_cast<double>(params.R)) /
                            ((kd + 2 * l + 1) * params.L());
    auto safe_ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
    for (std::size_t i = 0; i < k; ++i) {
        OffsetShiftRow row{};
        row.h = shifts[i];
        row.S_i = totals[i + 1].value();
        row.S_i_over_A = safe_ratio(row.S_i, report.A);
        row.level_free_prediction = SB * level_free_coef;
        row.gpy_prediction = SB * gpy_coef;
        row.ratio_level_free = safe_ratio(row.S_i, row.level_free_prediction);
        row.ratio_gpy = safe_ratio(row.S_i, row.gpy_prediction);
        report.offsets.push_back(row);
    }
    for (std::size_t s = k; s < shifts.size(); ++s) {
        ExternalShiftRow row{};
        row.h0 = shifts[s];
        row.S_0 = totals[s + 1].value();
        const KTuple joined = params.tuple.with(row.h0);
        row.series_union = singular_series(joined, std::max(params.p0, min_truncation(joined))).value;
        row.prediction = row.series_union * B / params.L();
        row.ratio = safe_ratio(row.S_0, row.prediction);
        report.shifts.push_back(row);
    }
    return report;
}

LedgerReport contradiction_ledger(const SieveParams& params, IntegerInterval window, Parallelism par) {
    if (window.hi < window.lo || window.hi - window.lo < 3)
        throw std::invalid_argument("contradiction_ledger: window length T must be >= 3");
    const std::uint64_t first = params.N;
    const std::uint64_t count = params.span + 1;
    require_fits(first + params.span, std::max(window.hi, params.tuple.back()), "contradiction_ledger: n + m");
    const auto primes = sieve_segment(first + std::min(window.lo, params.tuple.front()),
                                      first + params.span + std::max(window.hi, params.tuple.back()));
    const auto offsets = params.tuple.offsets();

    struct Partial {
        NeumaierSum A, A0, A1, sum_S_i, S;
        std::uint64_t d0 = 0, multi = 0;
    };
    std::vector<double> weights(count);
    std::vector<char> in_d0(count);
    const auto partials = map_weight_chunks<Partial>(
        params, par, [&](std::uint64_t chunk_first, std::span<const double> w) {
            Partial part;
            const std::uint64_t base = chunk_first - first;
            // c = #primes in [n + window.lo, n + window.hi], slid along the chunk.
            std::uint64_t c = 0;
            for (std::uint64_t m = window.lo; m <= window.hi; ++m)
                c += primes.is_prime(chunk_first + m) ? 1 : 0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const std::uint64_t n = chunk_first + i;
                if (i > 0) {
                    c -= primes.is_prime(n - 1 + window.lo) ? 1 : 0;
                    c += primes.is_prime(n + window.hi) ? 1 : 0;
                }
                std::uint64_t hits = 0;
                for (std::uint64_t h : offsets)
                    if (primes.is_prime(n + h)) {
                        ++hits;
                        part.sum_S_i.add(w[i]);
                    }
                part.A.add(w[i]);
                weights[base + i] = w[i];
                if (hits == 0) {
                    in_d0[base + i] = 1;
                    ++part.d0;
                    part.A0.add(w[i]);
                    part.S.add(w[i] * static_cast<double>(c));
                } else {
                    part.A1.add(w[i]);
                    if (hits > 1) ++part.multi;
                }
            }
            return part;
        });
    Partial total;
    for (const auto& p : partials) {
        total.A.merge(p.A);
        total.A0.merge(p.A0);
        total.A1.merge(p.A1);
        total.sum_S_i.merge(p.sum_S_i);
        total.S.merge(p.S);
        total.d0 += p.d0;
        total.multi += p.multi;
    }

    // Swapped order: m outer. Per-m inner sums are independent, then folded
    // in ascending m.
    const std::uint64_t m_count = window.hi - window.lo + 1;
    std::vector<double> per_m_d0(m_count), per_m_all(m_count);
    constexpr std::uint64_t kMChunk = 8;
    for_each_chunk(static_cast<std::size_t>((m_count + kMChunk - 1) / kMChunk), par, [&](std::size_t c) {
        const std::uint64_t begin = c * kMChunk;
        const std::uint64_t end = std::min(m_count, begin + kMChunk);
        for (std::uint64_t j = begin; j < end; ++j) {
            const std::uint64_t m = window.lo + j;
            NeumaierSum d0, all;
            for (std::uint64_t i = 0; i < count; ++i) {
                if (!primes.is_prime(first + i + m)) continue;
                all.add(weights[i]);
                if (in_d0[i]) d0.add(weights[i]);
            }
            per_m_d0[j] = d0.value();
            per_m_all[j] = all.value();
        }
    });

    LedgerReport r{};
    r.window = window;
    r.series = singular_series(params.tuple, params.p0).value;
    r.B = analytic_B(params).value();
    r.A = total.A.value();
    r.A0 = total.A0.value();
    r.A1 = total.A1.value();
    r.sum_S_i = total.sum_S_i.value();
    r.inclusion_exclusion_gap = (r.A - r.sum_S_i) - r.A0;
    r.multi_prime_count = total.multi;
    r.single_prime_identity_applies = total.multi == 0;
    const double k = static_cast<double>(params.k());
    const double T = static_cast<double>(window.hi - window.lo);
    r.A0_bound = 7.0 * r.series * r.B / (3.0 * std::sqrt(k));
    r.S = total.S.value();
    r.S_swapped = compensated_sum(per_m_d0);
    r.S_full_swapped = compensated_sum(per_m_all);
    r.S_lhs_bound = r.A0 * 2.0 * T / std::log(T);
    r.S_rhs_main = 5.0 * r.series * r.B * T / (6.0 * params.L());
    r.lhs_bound_holds = r.S <= r.S_lhs_bound;
    r.rhs_main_exceeded = r.S > r.S_rhs_main;
    r.D0_size = total.d0;
    r.D1_size = count - total.d0;
    return r;
}

} // namespace maillet
