#include "circlesys/names.hpp"
#include "circlesys/errors.hpp"

#include <map>

namespace circlesys {

TransectLayout transect_layout(const Params& P, int n) {
    if (n < 0 || n >= P.top_stage()) throw InputError("no transect beyond the parameter list");
    const std::uint64_t Q = P.q64(n + 1), Pn1 = P.p64(n + 1) % Q;
    const std::uint64_t q = P.q64(n), k = static_cast<std::uint64_t>(P.k[n]), l = static_cast<std::uint64_t>(P.l[n]);
    const std::uint64_t pinv = q == 1 ? 0 : mod_inverse(P.p64(n) % q, q);
    TransectLayout tl;
    tl.stage = n;
    tl.kind.resize(Q);
    tl.child.resize(Q);
    tl.inner.resize(Q);
    // which 1/q and 1/(kq) interval holds the left end of the orbit point t p'/q'
    std::vector<std::uint64_t> fine_cell(Q);
    for (std::uint64_t t = 0; t < Q; ++t) {
        const unsigned __int128 num = mulmod(t, Pn1, Q);
        fine_cell[t] = static_cast<std::uint64_t>(num * (k * q) / Q);
    }
    const std::uint64_t block = l * q;
    for (std::uint64_t b0 = 0; b0 < Q; b0 += block) {
        std::uint64_t first = block;
        for (std::uint64_t u = 0; u < block; ++u)
            if (fine_cell[b0 + u] / k == 0) {
                first = u;
                break;
            }
        if (first == block) throw OracleMismatch("transect block never visits the first interval");
        // the very first pass reads a complete copy first; it is relabelled b^q
        const std::uint64_t begin = first == 0 ? q : first;
        TransectLayout::Segment seg;
        seg.pass = b0 / (block * k);
        seg.block = (b0 / block) % k;
        seg.begin = begin;
        seg.middle = std::min(block - begin, (l - 1) * q);
        seg.end = block - begin - seg.middle;
        tl.segments.push_back(seg);
        for (std::uint64_t u = 0; u < block; ++u) {
            const std::uint64_t t = b0 + u;
            tl.kind[t] = u < seg.begin ? TransectLayout::Begin
                         : u < seg.begin + seg.middle ? TransectLayout::Middle
                                                      : TransectLayout::End;
            tl.child[t] = fine_cell[t] % k;
            const std::uint64_t g = fine_cell[t] / k;
            tl.inner[t] = q == 1 ? 0 : mulmod(pinv, g, q);
        }
    }
    return tl;
}

Word transect_word(const Params& P, int n, const std::vector<Word>& children) {
    const std::uint64_t q = P.q64(n);
    if (children.size() != static_cast<std::size_t>(P.k[n]))
        throw InputError("transect needs k_n child names");
    for (const auto& c : children)
        if (c.size() != q) throw InputError("child name length " + std::to_string(c.size()) + " differs from q_n");
    const auto tl = transect_layout(P, n);
    Word w(tl.kind.size());
    for (std::size_t t = 0; t < w.size(); ++t) {
        switch (tl.kind[t]) {
        case TransectLayout::Begin: w[t] = Symbol::b(); break;
        case TransectLayout::End: w[t] = Symbol::e(); break;
        default: w[t] = children[tl.child[t]][tl.inner[t]];
        }
    }
    return w;
}

namespace {

std::vector<TransectLayout> layouts(const GridProcess& proc, int m) {
    std::vector<TransectLayout> out;
    for (int mm = 0; mm < m; ++mm) out.push_back(transect_layout(proc.params(), mm));
    return out;
}

bool spacer_at(const TransectLayout& tl, std::uint64_t level) { return tl.kind[level] != TransectLayout::Middle; }

} // namespace

std::vector<Symbol> atom_labels(const GridProcess& proc, int m) {
    if (m < 0 || m > proc.stage()) throw InputError("labelling stage beyond the process");
    const auto tl = layouts(proc, m);
    std::vector<Symbol> lab(proc.atoms());
    for (std::uint64_t x = 0; x < proc.atoms(); ++x) {
        Symbol s = Symbol::inner(static_cast<std::int64_t>(proc.locate(0, x).tower));
        for (int mm = m; mm >= 1; --mm) {
            const auto kind = tl[mm - 1].kind[proc.locate(mm, x).level];
            if (kind == TransectLayout::Begin) {
                s = Symbol::b();
                break;
            }
            if (kind == TransectLayout::End) {
                s = Symbol::e();
                break;
            }
        }
        lab[x] = s;
    }
    return lab;
}

namespace {

Word tower_name(const GridProcess& proc, int m, std::uint64_t s, const std::vector<Symbol>& lab,
                const std::vector<std::vector<std::vector<std::uint64_t>>>& tw) {
    Word w;
    for (std::uint64_t t = 0; t < tw[s].size(); ++t) {
        const Symbol first = lab[tw[s][t].front()];
        for (auto x : tw[s][t])
            if (lab[x] != first)
                throw OracleMismatch("level " + std::to_string(t) + " of stage-" + std::to_string(m) + " tower " +
                                     std::to_string(s) + " carries two labels");
        w.push_back(first);
    }
    (void)proc;
    return w;
}

} // namespace

Word simulate_tower_name(const GridProcess& proc, int m, std::uint64_t s) {
    if (s >= proc.tower_count(m)) throw InputError("tower index out of range");
    return tower_name(proc, m, s, atom_labels(proc, m), proc.towers(m));
}

std::vector<Word> u_words(const GridProcess& proc, int n, std::uint64_t s) {
    if (n < 0 || n + 1 > proc.stage()) throw InputError("u-words need the next stage simulated");
    const Params& P = proc.params();
    const std::uint64_t k = static_cast<std::uint64_t>(P.k[n]), q = P.q64(n), p = P.p64(n) % q;
    const auto& hp = proc.hs()[n].perm;
    const std::uint64_t per_word = hp.rows / static_cast<std::uint64_t>(P.s[n + 1]);
    if (s >= static_cast<std::uint64_t>(P.s[n + 1])) throw InputError("strip index out of range");
    const std::uint64_t a = proc.cols() / hp.cols, b = proc.rows() / hp.rows;
    const auto lab = atom_labels(proc, n);
    const auto zn1 = proc.z(n + 1);
    std::vector<Word> out(k, Word(q));
    for (std::uint64_t j = 0; j < k; ++j)
        for (std::uint64_t t = 0; t < q; ++t) {
            const std::uint64_t hcol = j + k * mulmod(t, p, q);
            const std::uint64_t atom = (hcol * a) * proc.rows() + s * per_word * b;
            out[j][t] = lab[zn1(atom)];
        }
    return out;
}

std::vector<TowerCheck> crosscheck(const GridProcess& proc, int m) {
    if (m < 1 || m > proc.stage()) throw InputError("crosscheck needs 1 <= m <= stage");
    const Params& P = proc.params();
    const auto cp = CircParams::of_stage(P, m - 1);
    const auto lab = atom_labels(proc, m), lab_prev = atom_labels(proc, m - 1);
    const auto tw = proc.towers(m), tw_prev = proc.towers(m - 1);
    std::vector<TowerCheck> out;
    for (std::uint64_t s = 0; s < proc.tower_count(m); ++s) {
        TowerCheck tc;
        tc.tower = s;
        tc.simulated = tower_name(proc, m, s, lab, tw);
        const auto us = u_words(proc, m - 1, s);
        tc.expected = circ(us, cp);
        const auto& word = proc.hs()[m - 1].words[s];
        for (std::size_t j = 0; j < us.size(); ++j)
            if (us[j] != tower_name(proc, m - 1, static_cast<std::uint64_t>(word[j]), lab_prev, tw_prev))
                tc.children_match = false;
        for (std::uint64_t t = 0; t < tc.simulated.size(); ++t) {
            if (tc.simulated[t] == tc.expected[t]) continue;
            tc.full_match = false;
            if (tc.first_mismatch < 0) tc.first_mismatch = static_cast<std::int64_t>(t);
            if (classify(cp, t).kind == PositionClass::Interior) tc.interior_match = false;
        }
        out.push_back(std::move(tc));
    }
    return out;
}

namespace {

StabilityReport stability(const GridProcess& proc, int n, int other) {
    const Params& P = proc.params();
    const std::uint64_t q = P.q64(n);
    const auto lab = atom_labels(proc, n);
    const auto a = proc.action(n), b = proc.action(other);
    const auto ai = a.inverse(), bi = b.inverse();
    std::uint64_t same_label = 0, same_level = 0;
    for (std::uint64_t x = 0; x < proc.atoms(); ++x) {
        bool lab_ok = true, lvl_ok = true;
        std::uint64_t fa = x, fb = x, ba = x, bb = x;
        for (std::uint64_t i = 1; i <= q && (lab_ok || lvl_ok); ++i) {
            fa = a(fa);
            fb = b(fb);
            ba = ai(ba);
            bb = bi(bb);
            lab_ok = lab_ok && lab[fa] == lab[fb] && lab[ba] == lab[bb];
            lvl_ok = lvl_ok && proc.locate(n, fa) == proc.locate(n, fb) && proc.locate(n, ba) == proc.locate(n, bb);
        }
        same_label += lab_ok;
        same_level += lvl_ok;
    }
    StabilityReport r;
    const BigInt total = proc.atoms();
    r.label_fraction = Rational(BigInt(same_label), total);
    r.level_fraction = Rational(BigInt(same_level), total);
    r.bound = 1 - Rational(3, P.l[n]);
    return r;
}

} // namespace

StabilityReport name_stability(const GridProcess& proc, int n) {
    if (n < 0 || n + 1 > proc.stage()) throw InputError("stability needs stages n and n+1");
    return stability(proc, n, n + 1);
}

StabilityReport name_stability_self(const GridProcess& proc, int n) {
    if (n < 0 || n > proc.stage()) throw InputError("stage beyond the process");
    auto r = stability(proc, n, n);
    if (n < proc.params().top_stage()) r.bound = 1 - Rational(3, proc.params().l[n]);
    return r;
}

DistinctReport distinct_names(const GridProcess& proc, int m) {
    const auto lab = atom_labels(proc, m);
    const auto tw = proc.towers(m);
    std::map<Word, std::uint64_t> seen;
    DistinctReport r;
    for (std::uint64_t s = 0; s < proc.tower_count(m); ++s) {
        auto [it, fresh] = seen.emplace(tower_name(proc, m, s, lab, tw), s);
        if (!fresh) {
            r.distinct = false;
            r.a = it->second;
            r.b = s;
            return r;
        }
    }
    return r;
}

SpacerReport spacer_report(const GridProcess& proc, int m) {
    const int N = proc.stage();
    if (m < 1 || m > N) throw InputError("spacer report needs 1 <= m <= stage");
    const auto tl = layouts(proc, N);
    std::uint64_t spacer = 0, fresh = 0;
    std::vector<std::uint64_t> in_gamma(static_cast<std::size_t>(N + 1), 0);
    for (std::uint64_t x = 0; x < proc.atoms(); ++x) {
        int first = 0; // first stage putting x on a spacer, 0 if none
        for (int mm = 1; mm <= N && !first; ++mm)
            if (spacer_at(tl[mm - 1], proc.locate(mm, x).level)) first = mm;
        if (spacer_at(tl[m - 1], proc.locate(m, x).level)) {
            ++spacer;
            fresh += first == m;
        }
        for (int n = 0; n <= N; ++n)
            if (first == 0 || first <= n) ++in_gamma[n];
    }
    SpacerReport r;
    const BigInt total = proc.atoms();
    r.spacer_mass = Rational(BigInt(spacer), total);
    r.first_time_mass = Rational(BigInt(fresh), total);
    for (auto g : in_gamma) r.gamma.push_back(Rational(BigInt(g), total));
    return r;
}

} // namespace circlesys
