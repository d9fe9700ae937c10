#include "doctest.h"
#include "oracles.hpp"

#include "circlesys/consys.hpp"
#include "circlesys/errors.hpp"
#include "circlesys/factor.hpp"

#include <random>

using namespace circlesys;

namespace {

Params desk() { return derive_params({2, 2}, {4, 4}, {2, 2, 2}); }

Rational frac(const Rational& x) {
    BigInt fl = numerator(x) / denominator(x);
    if (x < 0 && fl * denominator(x) != numerator(x)) fl -= 1;
    return x - Rational(fl);
}

// the checks every coherent point must pass
void check_point(const Params& P, const SymbolicPoint& pt) {
    auto tr = rho_trace(P, pt);
    CHECK(tr.monotone);
    CHECK(tr.cauchy);
    for (int n = 1; n <= pt.top(); ++n) CHECK(d_index(P, n, tr.limit) == pt.r[n]);
    auto sh = shift_point(P, pt);
    if (sh.point) {
        auto tr2 = rho_trace(P, *sh.point);
        for (int n = 1; n <= pt.top(); ++n) CHECK(frac(tr2.rho[n] - tr.rho[n]) == P.alpha[n]);
    } else {
        REQUIRE(sh.crossing);
        CHECK(sh.crossing->stage >= 1);
    }
}

} // namespace

TEST_CASE("collapse onto the circle factor") {
    CHECK(compact(collapse_pi(from_compact("b000b111"))) == "b***b***");
    CHECK(compact(collapse_pi(from_compact("bbee"))) == "bbee");
    auto cs = build_sequence(2, desk(), {{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}});
    auto cf = circle_factor_sequence(desk(), 2);
    for (int n = 1; n <= 2; ++n)
        for (const auto& w : cs.level_words(n)) CHECK(collapse_pi(w) == cf.word(n, 0));
    // collapsing commutes with taking windows, i.e. with the shift
    auto w = cs.word(2, 1);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t a = rng() % w.size(), len = rng() % (w.size() - a);
        Word win(w.begin() + a, w.begin() + a + len);
        Word cw = collapse_pi(w);
        CHECK(collapse_pi(win) == Word(cw.begin() + a, cw.begin() + a + len));
    }
}

TEST_CASE("rho trace of the reference point") {
    Params P = desk();
    auto pt = parse_point("-,1,9");
    CHECK(to_string(pt) == "-,1,9");
    auto tr = rho_trace(P, pt);
    CHECK(tr.rho[1] == Rational(1, 8));
    CHECK(tr.rho[2] == Rational(73, 512));
    CHECK(tr.rho[2] - tr.rho[1] == Rational(9, 512));
    CHECK(tr.error_bound == Rational(1, 512));
    CHECK(d_index(P, 1, tr.limit) == 1);
    CHECK(d_index(P, 2, tr.limit) == 9);

    auto zero = rho_trace(P, parse_point("-,0,0"));
    CHECK(zero.limit == 0);

    CHECK_THROWS_AS(parse_point("-,x"), InputError);
    CHECK_THROWS_AS(parse_point("-"), InputError);
    try {
        rho_trace(P, parse_point("-,1,10"));
        FAIL("expected CoherenceError");
    } catch (const CoherenceError& e) {
        CHECK(e.stage == 2);
    }
    try {
        rho_trace(P, parse_point("-,4"));
        FAIL("expected CoherenceError");
    } catch (const CoherenceError& e) {
        CHECK(e.stage == 1);
    }
}

TEST_CASE("shifting points") {
    Params P = desk();
    auto sh = shift_point(P, parse_point("-,1,9"));
    REQUIRE(sh.point);
    CHECK(*sh.point == parse_point("-,2,10"));
    auto a = rho_trace(P, parse_point("-,1,9")), b = rho_trace(P, *sh.point);
    CHECK(b.rho[1] - a.rho[1] == Rational(1, 8));
    CHECK(frac(b.rho[2] - a.rho[2]) == Rational(65, 512));
    auto end = shift_point(P, parse_point("-,7"));
    REQUIRE(end.crossing);
    CHECK(end.crossing->stage == 1);
    // 3 -> 4 lands on the spacer in the middle of b000b111
    auto mid = shift_point(P, parse_point("-,3"));
    REQUIRE(mid.crossing);
    CHECK(mid.crossing->stage == 1);
}

TEST_CASE("exhaustive coherent points up to stage 2") {
    Params P = desk();
    int coherent = 0;
    for (int top = 1; top <= 2; ++top)
        for (std::uint64_t off = 0; off < P.q64(top); ++off)
            if (auto pt = point_from_top(P, top, off)) {
                ++coherent;
                CHECK(!coherence_failure(P, *pt));
                check_point(P, *pt);
            }
    // 6 interior letters at stage 1; stage 2 has 48 interior copies of 6 interior letters
    CHECK(coherent == 6 + 48 * 6);
}

TEST_CASE("random lazy stage-3 points") {
    Params P = extend_params(desk(), 2, 4, 2);
    auto cs = build_sequence(2, P, {{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}});
    REQUIRE(!cs.materialized(3));
    const auto* lazy = dynamic_cast<const LazyCircularWord*>(cs.levels[3][0].get());
    REQUIRE(lazy);
    std::mt19937_64 rng(43);
    int tested = 0;
    while (tested < 10000) {
        const std::uint64_t off = rng() % P.q64(3);
        auto pt = point_from_top(P, 3, off);
        if (!pt) continue;
        ++tested;
        check_point(P, *pt);
        // the lazily decoded copy structure agrees with the point's stage-2 offset
        CHECK(decode_position(*lazy, off).inner == pt->r[2]);
    }
}

TEST_CASE("hundred-fold shift") {
    // k=1 and a long l_0 give interior runs longer than 100
    Params P = derive_params({1, 1}, {128, 2}, {1, 1, 1});
    auto pt = point_from_top(P, 2, 0);
    std::uint64_t off = 0;
    while (!pt || pt->r[1] != 1) pt = point_from_top(P, 2, ++off);
    const auto start = rho_trace(P, *pt);
    SymbolicPoint cur = *pt;
    for (int i = 0; i < 100; ++i) {
        auto sh = shift_point(P, cur);
        REQUIRE(sh.point);
        cur = *sh.point;
    }
    const auto fin = rho_trace(P, cur);
    CHECK(frac(fin.limit - start.limit) == frac(100 * P.alpha[2]));
    CHECK(fin.monotone);
}
