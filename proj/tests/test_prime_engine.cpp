#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maillet/errors.hpp"
#include "maillet/prime_engine.hpp"
#include "oracles.hpp"

#include <random>

using namespace maillet;

TEST_CASE("segment matches trial division") {
    const auto t = sieve_segment(1'000'000, 1'001'000);
    CHECK(t.count() == 75);
    CHECK(t.primes() == oracle::trial_primes(1'000'000, 1'001'000));

    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t lo = rng() % 5000;
        const std::uint64_t hi = lo + 1 + rng() % 700;
        CAPTURE(lo);
        CAPTURE(hi);
        CHECK(sieve_segment(lo, hi).primes() == oracle::trial_primes(lo, hi));
    }
}

TEST_CASE("narrow segments give the same table") {
    SieveOptions narrow;
    narrow.segment_width = 64;
    for (std::uint64_t lo : {0ull, 1ull, 2ull, 3ull, 97ull, 1000ull, 65535ull}) {
        const auto a = sieve_segment(lo, lo + 3000);
        const auto b = sieve_segment(lo, lo + 3000, narrow);
        CHECK(a.primes() == b.primes());
    }
}

TEST_CASE("segment endpoints are inclusive") {
    CHECK(sieve_segment(2, 3).primes() == std::vector<std::uint64_t>{2, 3});
    CHECK(sieve_segment(0, 1).count() == 0);
    CHECK(sieve_segment(89, 97).primes() == std::vector<std::uint64_t>{89, 97});
    const auto t = sieve_segment(10, 20);
    CHECK(t.is_prime(11));
    CHECK_FALSE(t.is_prime(20));
    CHECK_THROWS_AS(t.is_prime(21), std::out_of_range);
    CHECK_THROWS_AS(t.is_prime(9), std::out_of_range);
}

TEST_CASE("segment preconditions") {
    CHECK_THROWS_AS(sieve_segment(5, 5), std::invalid_argument);
    CHECK_THROWS_AS(sieve_segment(6, 5), std::invalid_argument);
    SieveOptions tiny;
    tiny.max_span = 100;
    CHECK_THROWS_AS(sieve_segment(0, 1000, tiny), DomainError);
}

TEST_CASE("Miller-Rabin") {
    for (std::uint64_t n = 0; n < 20000; ++n) REQUIRE(is_prime(n) == oracle::trial_is_prime(n));
    CHECK(is_prime(1'000'000'007));
    CHECK_FALSE(is_prime(561));
    CHECK_FALSE(is_prime(3'215'031'751ull));          // strong pseudoprime to 2, 3, 5, 7
    CHECK_FALSE(is_prime(3'825'123'056'546'413'051ull));  // strong pseudoprime to bases up to 23
    CHECK(is_prime(18'446'744'073'709'551'557ull));   // largest 64-bit prime
    CHECK_FALSE(is_prime(18'446'744'073'709'551'615ull));
    CHECK(is_prime((std::uint64_t{1} << 61) - 1));
}

TEST_CASE("next_prime") {
    CHECK(next_prime(0) == 2);
    CHECK(next_prime(2) == 3);
    CHECK(next_prime(113) == 127);
    CHECK_THROWS_AS(next_prime(18'446'744'073'709'551'557ull), OverflowError);
}

TEST_CASE("counting") {
    CHECK(prime_count(1) == 0);
    CHECK(prime_count(2) == 1);
    CHECK(prime_count(100) == 25);
    CHECK(prime_count(1'000'000) == 78498);
    CHECK(nth_prime(1) == 2);
    CHECK(nth_prime(25) == 97);
    CHECK(nth_prime(10000) == 104729);
    CHECK_THROWS_AS(nth_prime(0), std::invalid_argument);
    for (std::uint64_t i = 1; i <= 300; ++i) CHECK(prime_count(nth_prime(i)) == i);
}

TEST_CASE("gaps pair every prime in [lo, hi) with its successor") {
    const auto g = gaps(100'000, 101'000);
    CHECK(g.size() == 81);
    const auto ps = oracle::trial_primes(100'000, 101'100);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g[i].p == ps[i]);
        CHECK(g[i].q == ps[i + 1]);
    }
    CHECK(g.back().p < 101'000);
    const auto small = gaps(2, 10);
    CHECK(small == std::vector<PrimePair>{{2, 3}, {3, 5}, {5, 7}, {7, 11}});
}

TEST_CASE("Brun-Titchmarsh check") {
    auto r = bt_check(1, 100);
    CHECK(r.pi_diff == 26);  // primes in (1, 101]
    CHECK(r.bound == doctest::Approx(200.0 / std::log(100.0)));
    CHECK(r.holds);

    r = bt_check(10'000, 1'000);
    CHECK(r.pi_diff == 106);
    CHECK(r.bound == doctest::Approx(289.5296546).epsilon(1e-9));
    CHECK(r.holds);

    r = bt_check(1, 3);
    CHECK(r.pi_diff == 2);
    CHECK(r.bound == doctest::Approx(5.4614).epsilon(1e-4));

    CHECK_THROWS_AS(bt_check(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(bt_check(10, 2), std::invalid_argument);
}
