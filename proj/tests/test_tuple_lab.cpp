#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maillet/errors.hpp"
#include "maillet/tuple_lab.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numeric>

using namespace maillet;

namespace {

std::vector<std::uint64_t> offsets_of(const KTuple& t) { return {t.offsets().begin(), t.offsets().end()}; }

std::vector<std::uint64_t> range(std::uint64_t hi) {
    std::vector<std::uint64_t> v(hi + 1);
    std::iota(v.begin(), v.end(), std::uint64_t{0});
    return v;
}

} // namespace

TEST_CASE("KTuple validation") {
    CHECK_THROWS_AS(KTuple({}), std::invalid_argument);
    CHECK_THROWS_AS(KTuple({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(KTuple({0, 2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(KTuple::from_unsorted({4, 0, 4}), std::invalid_argument);
    const auto t = KTuple::from_unsorted({6, 0, 2});
    CHECK(offsets_of(t) == std::vector<std::uint64_t>{0, 2, 6});
    CHECK(t.diameter() == 6);
    CHECK(t.contains(2));
    CHECK_FALSE(t.contains(4));
    CHECK(offsets_of(t.with(4)) == std::vector<std::uint64_t>{0, 2, 4, 6});
    CHECK(t.with(2) == t);
    CHECK(offsets_of(t.shifted(10)) == std::vector<std::uint64_t>{10, 12, 16});
    CHECK_THROWS_AS(t.shifted(~std::uint64_t{0} - 3), OverflowError);
}

TEST_CASE("residues_covered") {
    const KTuple t({0, 2, 6});
    CHECK(residues_covered(t, 2) == 1);
    CHECK(residues_covered(t, 3) == 2);
    CHECK(residues_covered(t, 5) == 3);
    CHECK(residues_covered(KTuple({0, 2, 4}), 3) == 3);
    CHECK_THROWS_AS(residues_covered(t, 4), std::invalid_argument);
    CHECK_THROWS_AS(residues_covered(t, 1), std::invalid_argument);
}

TEST_CASE("admissibility matches brute force on all small subsets") {
    std::size_t checked = 0;
    for (std::uint32_t mask = 1; mask < (1u << 21); ++mask) {
        if (__builtin_popcount(mask) > 4) continue;
        std::vector<std::uint64_t> h;
        for (std::uint64_t b = 0; b <= 20; ++b)
            if (mask & (1u << b)) h.push_back(b);
        REQUIRE(is_admissible(KTuple(h)) == oracle::admissible(h));
        ++checked;
    }
    CHECK(checked == 21 + 210 + 1330 + 5985);
}

TEST_CASE("admissibility is translation invariant") {
    for (auto h : {std::vector<std::uint64_t>{0, 2, 6}, {0, 4, 6}, {0, 2, 4}, {0, 2, 6, 8, 12}, {0, 1}}) {
        const KTuple t(h);
        for (std::uint64_t c : {1ull, 2ull, 3ull, 30ull, 1'000'003ull}) CHECK(is_admissible(t.shifted(c)) == is_admissible(t));
    }
    CHECK(is_admissible(KTuple({0, 2, 6})));
    CHECK(is_admissible(KTuple({0, 4, 6})));
    CHECK_FALSE(is_admissible(KTuple({0, 2, 4})));
    CHECK_FALSE(is_admissible(KTuple({0, 1})));
    CHECK(is_admissible(KTuple({5})));
}

TEST_CASE("k_from_epsilon") {
    CHECK(k_from_epsilon(1.0) == 36);
    CHECK(k_from_epsilon(0.5) == 144);
    CHECK(k_from_epsilon(0.3) == 400);
    CHECK(k_from_epsilon(0.7) == 74);  // (6/0.7)^2 = 73.47
    CHECK_THROWS_AS(k_from_epsilon(0.0), std::invalid_argument);
    CHECK_THROWS_AS(k_from_epsilon(1.5), std::invalid_argument);
    CHECK_THROWS_AS(k_from_epsilon(-0.1), std::invalid_argument);
}

TEST_CASE("greedy_admissible") {
    const auto c = range(10);
    CHECK(offsets_of(greedy_admissible(3, c)) == std::vector<std::uint64_t>{0, 2, 6});
    const auto wide = range(400);
    for (std::size_t k = 1; k <= 20; ++k) {
        CAPTURE(k);
        const auto t = greedy_admissible(k, wide);
        CHECK(offsets_of(t) == oracle::greedy(k, 400));
        CHECK(is_admissible(t));
    }
    CHECK_THROWS_AS(greedy_admissible(5, c), DomainError);
    CHECK_THROWS_AS(greedy_admissible(0, c), std::invalid_argument);
}

TEST_CASE("interval_system geometry") {
    const auto sys = interval_system(1.0, 10, 4);
    REQUIRE(sys.entries.size() == 4);
    CHECK(sys.entries[0].base == 10);
    CHECK(sys.entries[1].base == 21);
    CHECK(sys.entries[2].base == 43);
    CHECK(sys.entries[0].full == IntegerInterval{10, 20});
    CHECK(sys.entries[0].window == IntegerInterval{15, 20});

    for (double eps : {1.0, 0.5, 0.25, 0.4}) {
        const auto s = interval_system(eps, 1000, eps < 0.5 ? 2 : 3);
        for (std::size_t nu = 1; nu < s.entries.size(); ++nu) {
            const auto& prev = s.entries[nu - 1];
            const auto& cur = s.entries[nu];
            CAPTURE(eps);
            CAPTURE(nu);
            // Minimal H_nu: H^eps > 2 H_prev but (H - 1)^eps <= 2 H_prev.
            CHECK(std::pow(static_cast<long double>(cur.base), eps) > 2.0L * prev.base);
            CHECK(std::pow(static_cast<long double>(cur.base - 1), eps) <= 2.0L * prev.base);
            CHECK(cur.width == static_cast<std::uint64_t>(std::floor(std::pow(static_cast<long double>(cur.base), eps) + 1e-9L)));
            // Window lower end sits at least H_nu above H_{nu-1}.
            CHECK(cur.window.lo - prev.base >= cur.base);
            // Any offset in I'_prev still leaves room H_nu below max I'_nu.
            CHECK(prev.window.hi + cur.base <= cur.window.hi);
        }
    }
    CHECK_THROWS_AS(interval_system(0.5, 10'000, 4), OverflowError);
    CHECK_THROWS_AS(interval_system(0.0, 10, 2), std::invalid_argument);
    CHECK_THROWS_AS(interval_system(0.5, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(interval_system(0.5, 10, 0), std::invalid_argument);
}

TEST_CASE("pick_tuple_in_windows") {
    const auto sys = interval_system(1.0, 10, 3);
    const auto t2 = pick_tuple_in_windows(sys, 2);
    CHECK(offsets_of(t2) == std::vector<std::uint64_t>{15, 37});

    for (double eps : {1.0, 0.5}) {
        const auto s = interval_system(eps, eps == 1.0 ? 10 : 100, 3);
        const auto t = pick_tuple_in_windows(s, 3);
        CHECK(is_admissible(t));
        const auto h = t.offsets();
        for (std::size_t mu = 0; mu < 3; ++mu) {
            CHECK(s.entries[mu].window.contains(h[mu]));
            for (std::size_t nu = 0; nu < mu; ++nu) CHECK(s.entries[mu].full.contains(h[mu] - h[nu]));
        }
    }
    CHECK_THROWS_AS(pick_tuple_in_windows(sys, 4), std::invalid_argument);
}
