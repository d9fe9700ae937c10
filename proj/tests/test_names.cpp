#include "doctest.h"
#include "oracles.hpp"

#include "circlesys/consys.hpp"
#include "circlesys/errors.hpp"
#include "circlesys/names.hpp"

#include <random>

using namespace circlesys;

namespace {

using Words = std::vector<std::vector<std::int64_t>>;
Params desk() { return derive_params({2, 2}, {4, 4}, {2, 2, 2}); }
const Words kSwap = {{0, 1}, {1, 0}};

bool layout_matches_circ(const Params& P, int n) {
    const auto tl = transect_layout(P, n);
    const auto cp = CircParams::of_stage(P, n);
    for (std::uint64_t t = 0; t < tl.kind.size(); ++t) {
        const auto pc = classify(cp, t);
        if (pc.kind == PositionClass::Interior) {
            if (tl.kind[t] != TransectLayout::Middle || tl.child[t] != pc.block || tl.inner[t] != pc.inner) return false;
        } else if (tl.kind[t] != (pc.letter.is_b() ? TransectLayout::Begin : TransectLayout::End)) {
            return false;
        }
    }
    return true;
}

Word starred(Word w) {
    for (auto& s : w)
        if (s.is_inner()) s = Symbol::star();
    return w;
}

} // namespace

TEST_CASE("transect layout agrees with the circular layout") {
    Params P = desk();
    CHECK(layout_matches_circ(P, 0));
    CHECK(layout_matches_circ(P, 1));
    CHECK(layout_matches_circ(extend_params(P, 2, 4, 2), 2));
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::int64_t> k, l, s{1};
        for (int n = 0; n < 2; ++n) {
            k.push_back(1 + static_cast<std::int64_t>(rng() % 3));
            l.push_back(2 + static_cast<std::int64_t>(rng() % 4));
            s.push_back(1);
        }
        Params R = derive_params(k, l, s);
        CHECK(layout_matches_circ(R, 0));
        CHECK(layout_matches_circ(R, 1));
    }
    auto tl = transect_layout(P, 1);
    for (const auto& seg : tl.segments) CHECK(seg.begin + seg.middle + seg.end == 32);
    CHECK(tl.segments.size() == 16);
    CHECK(tl.segments[2].begin == 7); // pass 1: q - j_1 = 8 - 1
    CHECK(tl.segments[2].end == 1);
}

TEST_CASE("transect words") {
    Params P = desk();
    CHECK(compact(transect_word(P, 0, {from_compact("*"), from_compact("*")})) == "b***b***");
    CHECK(compact(transect_word(P, 0, {from_compact("0"), from_compact("1")})) == "b000b111");
    auto w2 = transect_word(P, 1, {from_compact("b000b111"), from_compact("b111b000")});
    CHECK(compact(w2) == oracle::circ({"b000b111", "b111b000"}, 4, 1, 8));
    // single child: b^{q-j_i} u^{l-1} e^{j_i} per pass
    Params one = derive_params({1, 1}, {3, 3}, {1, 1, 1});
    auto u = from_compact("b00");
    CHECK(compact(transect_word(one, 1, {u})) == oracle::circ({"b00"}, 3, 1, 3));
    CHECK_THROWS_AS(transect_word(P, 1, {from_compact("b000b111")}), InputError);
    CHECK_THROWS_AS(transect_word(P, 1, {from_compact("b00"), from_compact("b11")}), InputError);
}

TEST_CASE("simulated tower names at stage 1") {
    auto g = simulate(desk(), {kSwap});
    CHECK(compact(simulate_tower_name(g, 1, 0)) == "b000b111");
    CHECK(compact(simulate_tower_name(g, 1, 1)) == "b111b000");
    auto u = u_words(g, 0, 0);
    REQUIRE(u.size() == 2);
    CHECK(compact(u[0]) == "0");
    CHECK(compact(u[1]) == "1");
    CHECK(compact(u_words(g, 0, 1)[0]) == "1");
    CHECK_THROWS_AS(u_words(g, 1, 0), InputError);
    CHECK_THROWS_AS(simulate_tower_name(g, 1, 2), InputError);
}

TEST_CASE("name oracle at stages 1 and 2") {
    auto g = simulate(desk(), {kSwap, kSwap});
    auto cs = build_sequence(2, desk(), {{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}});
    for (int m = 1; m <= 2; ++m) {
        for (const auto& tc : crosscheck(g, m)) {
            CHECK(tc.interior_match);
            CHECK(tc.full_match);
            CHECK(tc.children_match);
            // every simulated name is a word of the matching level
            CHECK(tc.simulated == cs.word(m, tc.tower));
        }
    }
    // identity h with one strip: names read one letter
    auto c = simulate(derive_params({2, 2}, {4, 4}, {1, 1, 1}), {{{0, 0}}, {{0, 0}}});
    CHECK(compact(starred(simulate_tower_name(c, 1, 0))) == "b***b***");
    auto cf = circle_factor_sequence(c.params(), 2);
    CHECK(starred(simulate_tower_name(c, 2, 0)) == cf.word(2, 0));
    for (const auto& tc : crosscheck(c, 2)) CHECK(tc.full_match);
    CHECK(u_words(c, 1, 0)[0] == simulate_tower_name(c, 1, 0));
}

TEST_CASE("spacer mass and Gamma") {
    auto g = simulate(desk(), {kSwap, kSwap});
    for (int m = 1; m <= 2; ++m) {
        auto r = spacer_report(g, m);
        CHECK(r.spacer_mass == Rational(1, 4));
        CHECK(r.first_time_mass <= r.spacer_mass);
        for (std::size_t n = 0; n + 1 < r.gamma.size(); ++n) CHECK(r.gamma[n] <= r.gamma[n + 1]);
        CHECK(r.gamma.back() == 1);
        // mass of Gamma_n is at least 1 - sum_{m>n} 1/l_{m-1}
        CHECK(r.gamma[0] >= Rational(1, 2));
        CHECK(r.gamma[1] >= Rational(3, 4));
    }
    // each stage-2 spacer run covers every stage-1 position once per block; positions
    // 0 and 4 of b000b111 were spacers already, so 6/8 of 1/4 is new
    CHECK(spacer_report(g, 2).first_time_mass == Rational(3, 16));
}

TEST_CASE("name stability") {
    auto g = simulate(desk(), {kSwap, kSwap});
    for (int n = 0; n < 2; ++n) {
        auto r = name_stability(g, n);
        CHECK(r.label_fraction >= r.bound);
        CHECK(r.level_fraction >= r.bound);
        CHECK(r.bound == Rational(1, 4));
        auto self = name_stability_self(g, n);
        CHECK(self.label_fraction == 1);
        CHECK(self.level_fraction == 1);
    }
    Params big = derive_params({2}, {64}, {2, 2});
    auto gb = simulate(big, {kSwap});
    auto rb = name_stability(gb, 0);
    CHECK(rb.bound == Rational(61, 64));
    CHECK(rb.label_fraction >= rb.bound);
    CHECK(rb.level_fraction >= rb.bound);
}

TEST_CASE("distinct names") {
    auto g = simulate(desk(), {kSwap, kSwap});
    CHECK(distinct_names(g, 1).distinct);
    CHECK(distinct_names(g, 2).distinct);
    auto d = simulate(derive_params({2, 2}, {4, 4}, {2, 2, 4}), {kSwap, {{0, 1}, {1, 0}, {0, 1}, {1, 0}}});
    auto r = distinct_names(d, 2);
    CHECK(!r.distinct);
    CHECK(r.a == 0);
    CHECK(r.b == 2);
    auto c = simulate(derive_params({2}, {4}, {1, 1}), {{{0, 0}}});
    CHECK(distinct_names(c, 1).distinct);
}
