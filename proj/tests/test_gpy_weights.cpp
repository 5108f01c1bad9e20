#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maillet/errors.hpp"
#include "maillet/gpy_weights.hpp"
#include "maillet/prime_engine.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace maillet;

namespace {

SieveParams params(std::vector<std::uint64_t> h, std::uint64_t N, std::uint64_t ell, std::uint64_t R,
                   std::optional<std::uint64_t> span = std::nullopt, std::optional<std::uint64_t> T = std::nullopt) {
    ParamChoices c;
    c.ell = ell;
    c.R = R;
    c.span = span;
    c.T = T;
    return make_params(KTuple(std::move(h)), N, c);
}

} // namespace

TEST_CASE("parameter defaults and validation") {
    const auto p = make_params(KTuple({0, 2, 6}), 1'000'000, {.r_exponent = 1.0 / 3.0});
    CHECK(p.R == 100);
    CHECK(p.ell == 0);
    CHECK(p.span == 1'000'000);
    CHECK(p.p0 == 1'000'000);

    const auto d = make_params(KTuple({0, 2, 6, 8, 12, 18, 20, 26, 30}), 1'000'000);
    CHECK(d.ell == 1);
    CHECK(d.R == static_cast<std::uint64_t>(1e6 * std::exp(-std::sqrt(std::log(1e6)))));

    CHECK_THROWS_AS(params({0, 2, 4}, 1000, 1, 10), std::invalid_argument);
    CHECK_THROWS_AS(params({0, 2}, 1000, 1, 1001), std::invalid_argument);
    CHECK_THROWS_AS(params({0, 2}, 1000, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(params({0, 2}, 1000, 3, 10), std::invalid_argument);
    CHECK_THROWS_AS(params({0, 2}, 0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_params(KTuple({0, 2}), 1000, {.r_exponent = 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(params({0, 2}, ~std::uint64_t{0} / 2 + 1, 1, 10), OverflowError);

    CHECK(snapped_floor(99.99999999999997) == 100);
    CHECK(snapped_floor(99.5) == 99);
}

TEST_CASE("single weights") {
    CHECK(weight(9, params({0}, 10, 0, 3)) == doctest::Approx(1.2069489608125820).epsilon(1e-14));
    CHECK(weight(13, params({0, 2}, 10, 1, 5)) == doctest::Approx(0.45239418725474913).epsilon(1e-14));
    CHECK(weight(7, params({0}, 10, 0, 1)) == 0.0);  // log R = 0

    for (auto [h, ell, R] : {std::tuple{std::vector<std::uint64_t>{0, 2}, 1u, 30ull},
                             std::tuple{std::vector<std::uint64_t>{0, 2, 6}, 1u, 60ull},
                             std::tuple{std::vector<std::uint64_t>{0, 4, 6, 10}, 2u, 210ull}}) {
        const auto p = params(h, 1'000, ell, R);
        const WeightSieve sieve(p);
        for (std::uint64_t n = 1; n <= 400; ++n) {
            CAPTURE(n);
            CHECK(sieve.weight(n) == doctest::Approx(static_cast<double>(oracle::weight(n, h, ell, R))).epsilon(1e-11));
        }
    }
}

TEST_CASE("chunk fill agrees with trial division") {
    const auto p = params({0, 2, 6, 8}, 50'000, 1, 500);
    const WeightSieve sieve(p);
    WeightSieve::Scratch scratch;
    std::vector<double> out(3'000);
    sieve.fill(49'999, out, scratch);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(sieve.weight(49'999 + i)).epsilon(1e-12));
    CHECK(sieve.primes().size() == 95);
    CHECK(sieve.residues(0).size() == 1);  // p = 2
    CHECK(sieve.residues(1).size() == 2);  // p = 3
}

TEST_CASE("window sums against the brute-force oracle") {
    const auto a = params({0, 2}, 1'000, 1, 100);
    CHECK(sum_A(a, SumStrategy::per_n) == doctest::Approx(47504.4704505133657).epsilon(1e-11));
    CHECK(sum_A(a, SumStrategy::divisor_swap) == doctest::Approx(47504.4704505133657).epsilon(1e-11));

    const auto b = params({0, 2, 6}, 1'000, 1, 10);
    const double oracle_b = static_cast<double>(oracle::sum_A(1'000, 2'000, {0, 2, 6}, 1, 10));
    CHECK(oracle_b == doctest::Approx(958.703018292291654).epsilon(1e-13));
    CHECK(sum_A(b, SumStrategy::per_n) == doctest::Approx(oracle_b).epsilon(1e-11));

    for (std::uint64_t h0 : {0ull, 2ull, 4ull, 7ull, 30ull}) {
        CAPTURE(h0);
        CHECK(sum_prime_shift(b, h0) ==
              doctest::Approx(static_cast<double>(oracle::sum_shift(1'000, 2'000, {0, 2, 6}, 1, 10, h0))).epsilon(1e-11));
    }
    CHECK_THROWS_AS(sum_prime_shift(b, 4'001), std::invalid_argument);
}

TEST_CASE("per-n and divisor-swap strategies agree") {
    struct Case {
        std::vector<std::uint64_t> h;
        std::uint64_t N, ell, R, span;
    };
    for (const auto& c : {Case{{0, 2}, 10'000, 1, 1'000, 10'000}, Case{{0, 2, 6}, 100'000, 1, 46, 100'000},
                          Case{{0, 4, 6, 10}, 30'000, 2, 300, 777}, Case{{0, 2, 6, 8, 12}, 5'000, 1, 200, 5'000},
                          Case{{3}, 99'999, 0, 999, 12'345}}) {
        const auto p = params(c.h, c.N, c.ell, c.R, c.span);
        const double a = sum_A(p, SumStrategy::per_n);
        const double b = sum_A(p, SumStrategy::divisor_swap);
        CAPTURE(c.N);
        CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
    }
}

TEST_CASE("analytic main term") {
    const auto p = params({0, 2, 6}, 1'000'000, 1, 100);
    const double logR = std::log(100.0);
    const double expect = 2.0 * 1e6 * std::pow(logR, 5) / 120.0;
    CHECK(analytic_B(p).value() == doctest::Approx(expect).epsilon(1e-13));
    CHECK(analytic_B(p).sign == 1);

    double prev = 0;
    for (std::uint64_t R : {2ull, 3ull, 10ull, 100ull, 1'000ull}) {
        const double b = analytic_B(params({0, 2, 6}, 10'000, 1, R)).value();
        CHECK(b > prev);
        prev = b;
    }
    prev = 0;
    for (std::uint64_t N : {100ull, 1'000ull, 100'000ull}) {
        const double b = analytic_B(params({0, 2, 6}, N, 1, 50)).value();
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("ratio report rows") {
    const auto p = params({0, 2, 6}, 20'000, 1, 27);
    const std::vector<std::uint64_t> h0s{2, 4, 8, 12};
    const auto r = ratio_report(p, h0s);
    CHECK(r.A == doctest::Approx(sum_A(p, SumStrategy::per_n)).epsilon(1e-12));
    REQUIRE(r.offsets.size() == 3);
    for (const auto& row : r.offsets) CHECK(row.S_i == doctest::Approx(sum_prime_shift(p, row.h)).epsilon(1e-12));
    REQUIRE(r.shifts.size() == 3);  // 2 belongs to H
    CHECK(r.shifts[0].h0 == 4);
    CHECK(r.shifts[0].series_union == 0.0);  // {0, 2, 4, 6} covers 3
    CHECK(r.shifts[0].S_0 == doctest::Approx(sum_prime_shift(p, 4)).epsilon(1e-12));
    CHECK(r.shifts[1].series_union > 0.0);
    const double coef = 3.0 / 4.0 / 6.0;
    CHECK(r.offsets[0].level_free_prediction == doctest::Approx(coef * r.series.value * r.B.value()).epsilon(1e-12));
}

TEST_CASE("ledger identities") {
    const auto p = params({0, 2}, 20'000, 1, 100, std::nullopt, 200);
    const auto l = contradiction_ledger(p, {20'000, 20'200});
    CHECK(l.A == doctest::Approx(sum_A(p, SumStrategy::per_n)).epsilon(1e-12));
    CHECK(l.A0 <= l.A);
    CHECK(l.A0 + l.A1 == doctest::Approx(l.A).epsilon(1e-12));
    CHECK(l.D0_size + l.D1_size == p.span + 1);
    CHECK(std::abs(l.S - l.S_swapped) <= 1e-12 * std::abs(l.S));
    CHECK(l.S_full_swapped >= l.S_swapped);
    CHECK(l.inclusion_exclusion_gap == doctest::Approx((l.A - l.sum_S_i) - l.A0).scale(l.A));
    if (l.multi_prime_count == 0) CHECK(std::abs(l.inclusion_exclusion_gap) <= 1e-9 * l.A);
    else CHECK(l.inclusion_exclusion_gap < 0.0);  // n with several prime shifts are counted more than once
    CHECK(l.single_prime_identity_applies == (l.multi_prime_count == 0));
    CHECK(l.sum_S_i <= 2 * l.A);
    CHECK(l.lhs_bound_holds == (l.S <= l.S_lhs_bound));

    // Brute-force S over D0 for a narrow window.
    const auto q = params({0, 2}, 2'000, 1, 20, 300, 30);
    const auto small = contradiction_ledger(q, {2'000, 2'030});
    long double S = 0, A0 = 0;
    for (std::uint64_t n = 2'000; n <= 2'300; ++n) {
        if (oracle::trial_is_prime(n) || oracle::trial_is_prime(n + 2)) continue;
        const long double a = oracle::weight(n, {0, 2}, 1, 20);
        A0 += a;
        for (std::uint64_t m = 2'000; m <= 2'030; ++m)
            if (oracle::trial_is_prime(n + m)) S += a;
    }
    CHECK(small.A0 == doctest::Approx(static_cast<double>(A0)).epsilon(1e-11));
    CHECK(small.S == doctest::Approx(static_cast<double>(S)).epsilon(1e-11));
    CHECK_THROWS_AS(contradiction_ledger(q, {2'000, 2'002}), std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count") {
    const auto p = params({0, 2, 6}, 100'000, 1, 46, std::nullopt, 100);
    const double a1 = sum_A(p, SumStrategy::per_n, {1});
    CHECK(sum_A(p, SumStrategy::per_n, {3}) == a1);
    CHECK(sum_A(p, SumStrategy::divisor_swap, {1}) == sum_A(p, SumStrategy::divisor_swap, {5}));
    const auto l1 = contradiction_ledger(p, {100'000, 100'100}, {1});
    const auto l4 = contradiction_ledger(p, {100'000, 100'100}, {4});
    CHECK(l1.S == l4.S);
    CHECK(l1.S_swapped == l4.S_swapped);
    CHECK(l1.A0 == l4.A0);
}
