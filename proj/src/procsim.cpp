#include "circlesys/procsim.hpp"
#include "circlesys/errors.hpp"
#include "circlesys/words.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>

namespace circlesys {

GridPermutation GridPermutation::identity(std::uint64_t cols, std::uint64_t rows) {
    GridPermutation g;
    g.cols = cols;
    g.rows = rows;
    g.to.resize(cols * rows);
    std::iota(g.to.begin(), g.to.end(), std::uint64_t{0});
    return g;
}

GridPermutation GridPermutation::inverse() const {
    GridPermutation g = *this;
    for (std::uint64_t i = 0; i < to.size(); ++i) g.to[to[i]] = i;
    return g;
}

GridPermutation GridPermutation::refine(std::uint64_t new_cols, std::uint64_t new_rows) const {
    if (new_cols % cols || new_rows % rows)
        throw InputError("refinement " + std::to_string(new_cols) + "x" + std::to_string(new_rows) +
                         " does not subdivide " + std::to_string(cols) + "x" + std::to_string(rows));
    const std::uint64_t a = new_cols / cols, b = new_rows / rows;
    GridPermutation g;
    g.cols = new_cols;
    g.rows = new_rows;
    g.stride = stride * a;
    g.to.resize(new_cols * new_rows);
    for (std::uint64_t c = 0; c < new_cols; ++c)
        for (std::uint64_t r = 0; r < new_rows; ++r) {
            const std::uint64_t img = to[index(c / a, r / b)];
            g.to[g.index(c, r)] = g.index(col(img) * a + c % a, row(img) * b + r % b);
        }
    return g;
}

bool GridPermutation::is_bijective() const {
    std::vector<char> seen(to.size(), 0);
    for (auto x : to) {
        if (x >= to.size() || seen[x]) return false;
        seen[x] = 1;
    }
    return true;
}

bool GridPermutation::commutes_with(const GridPermutation& o) const {
    if (o.cols != cols || o.rows != rows) return false;
    for (std::uint64_t i = 0; i < to.size(); ++i)
        if (to[o.to[i]] != o.to[to[i]]) return false;
    return true;
}

GridPermutation compose(const GridPermutation& outer, const GridPermutation& inner) {
    if (outer.cols != inner.cols || outer.rows != inner.rows)
        throw InputError("composing permutations of different resolutions");
    GridPermutation g = inner;
    for (std::uint64_t i = 0; i < g.to.size(); ++i) g.to[i] = outer.to[inner.to[i]];
    return g;
}

GridPermutation rotation_perm(const Params& P, int n, std::uint64_t cols, std::uint64_t rows) {
    const std::uint64_t q = P.q64(n);
    if (cols % q) throw InputError("rotation grid: " + std::to_string(cols) + " columns not divisible by q_" +
                                   std::to_string(n) + "=" + std::to_string(q));
    const std::uint64_t shift = mulmod(P.p64(n) % q, cols / q, cols);
    GridPermutation g;
    g.cols = cols;
    g.rows = rows;
    g.stride = shift;
    g.to.resize(cols * rows);
    for (std::uint64_t c = 0; c < cols; ++c)
        for (std::uint64_t r = 0; r < rows; ++r) g.to[g.index(c, r)] = g.index((c + shift) % cols, r);
    return g;
}

namespace {

std::string word_text(const std::vector<std::int64_t>& w) {
    std::string s = "(";
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s + ")";
}

// returns empty string when the word satisfies the occurrence condition
std::string occurrence_problem(const std::vector<std::int64_t>& w, std::int64_t k, std::int64_t sn) {
    if (static_cast<std::int64_t>(w.size()) != k)
        return "word " + word_text(w) + " has length " + std::to_string(w.size()) + ", expected " + std::to_string(k);
    std::vector<std::int64_t> occ(static_cast<std::size_t>(sn), 0);
    for (auto x : w) {
        if (x < 0 || x >= sn) return "word " + word_text(w) + " uses letter " + std::to_string(x) + " >= s_n";
        ++occ[static_cast<std::size_t>(x)];
    }
    for (std::int64_t i = 0; i < sn; ++i)
        if (occ[static_cast<std::size_t>(i)] != k / sn)
            return "letter " + std::to_string(i) + " occurs " + std::to_string(occ[static_cast<std::size_t>(i)]) +
                   " times in " + word_text(w) + ", expected " + std::to_string(k / sn);
    return {};
}

} // namespace

HData h_from_words(const Params& P, int n, const std::vector<std::vector<std::int64_t>>& words) {
    if (n < 0 || n >= P.top_stage()) throw InputError("no parameters for h_" + std::to_string(n + 1));
    const std::int64_t k = P.k[n], sn = P.s[n], sn1 = P.s[n + 1];
    if (static_cast<std::int64_t>(words.size()) != sn1)
        throw InputError("stage " + std::to_string(n) + ": " + std::to_string(words.size()) + " words given, s_" +
                         std::to_string(n + 1) + "=" + std::to_string(sn1));
    for (const auto& w : words)
        if (auto why = occurrence_problem(w, k, sn); !why.empty())
            throw ConstraintError("occurrence condition fails at stage " + std::to_string(n) + ": " + why);
    HData h;
    h.stage = n;
    h.words = words;
    for (std::size_t a = 0; a < words.size(); ++a)
        for (std::size_t b = a + 1; b < words.size(); ++b)
            if (words[a] == words[b])
                h.warnings.push_back("words " + std::to_string(a) + " and " + std::to_string(b) +
                                     " coincide; their towers cannot be told apart (distinct words condition)");

    const std::uint64_t q = P.q64(n), K = static_cast<std::uint64_t>(k);
    const std::uint64_t L = std::lcm(static_cast<std::uint64_t>(sn), static_cast<std::uint64_t>(sn1));
    const std::uint64_t per_word = L / static_cast<std::uint64_t>(sn1), per_strip = L / static_cast<std::uint64_t>(sn);
    GridPermutation g;
    g.cols = K * q;
    g.rows = L;
    g.stride = mulmod(P.p64(n) % q, K, K * q);
    g.to.assign(g.cols * g.rows, 0);

    // first column block: sources of letter i in (s, t, sub-row) order, targets in strip i by (row, col)
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> sources(static_cast<std::size_t>(sn));
    for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(sn1); ++s)
        for (std::uint64_t t = 0; t < K; ++t)
            for (std::uint64_t a = 0; a < per_word; ++a)
                sources[static_cast<std::size_t>(words[s][t])].push_back({t, s * per_word + a});
    std::vector<std::pair<std::uint64_t, std::uint64_t>> block(K * L); // (col, row) -> (col', row')
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(sn); ++i) {
        std::size_t next = 0;
        for (std::uint64_t r = i * per_strip; r < (i + 1) * per_strip; ++r)
            for (std::uint64_t c = 0; c < K; ++c) {
                auto [sc, sr] = sources[i].at(next++);
                block[sc * L + sr] = {c, r};
            }
    }
    for (std::uint64_t cb = 0; cb < q; ++cb)
        for (std::uint64_t c = 0; c < K; ++c)
            for (std::uint64_t r = 0; r < L; ++r) {
                auto [tc, tr] = block[c * L + r];
                g.to[g.index(cb * K + c, r)] = g.index(cb * K + tc, tr);
            }
    h.perm = std::move(g);
    return h;
}

std::vector<std::vector<std::int64_t>> readback(const HData& h, const Params& P) {
    const std::uint64_t K = static_cast<std::uint64_t>(P.k[h.stage]);
    const std::uint64_t sn = static_cast<std::uint64_t>(P.s[h.stage]);
    const std::uint64_t sn1 = static_cast<std::uint64_t>(P.s[h.stage + 1]);
    const auto& g = h.perm;
    std::vector<std::vector<std::int64_t>> out(sn1, std::vector<std::int64_t>(K));
    for (std::uint64_t s = 0; s < sn1; ++s)
        for (std::uint64_t t = 0; t < K; ++t) {
            const auto img = g(g.index(t, s * (g.rows / sn1)));
            out[s][t] = static_cast<std::int64_t>(g.row(img) / (g.rows / sn));
        }
    return out;
}

std::uint64_t GridProcess::tower_count(int m) const { return static_cast<std::uint64_t>(params_.s.at(m)); }
std::uint64_t GridProcess::tower_length(int m) const { return params_.q64(m); }

GridProcess GridProcess::base(const Params& P, std::uint64_t cap) {
    GridProcess g;
    g.params_ = P;
    g.cap_ = cap;
    g.cols_ = 1;
    g.rows_ = static_cast<std::uint64_t>(P.s.at(0));
    if (g.atoms() > cap) throw ResourceError("stage 0 grid exceeds the atom cap");
    g.zinv_.push_back(GridPermutation::identity(g.cols_, g.rows_));
    g.jtab_.push_back({0});
    return g;
}

TowerPos GridProcess::locate(int m, std::uint64_t atom) const {
    const auto& zi = zinv_.at(m);
    const std::uint64_t y = zi(atom);
    const std::uint64_t cb = zi.col(y) / (cols_ / tower_length(m));
    return {zi.row(y) / (rows_ / tower_count(m)), jtab_[m][cb]};
}

std::vector<std::vector<std::vector<std::uint64_t>>> GridProcess::towers(int m) const {
    std::vector<std::vector<std::vector<std::uint64_t>>> out(
        tower_count(m), std::vector<std::vector<std::uint64_t>>(tower_length(m)));
    for (std::uint64_t x = 0; x < atoms(); ++x) {
        auto pos = locate(m, x);
        out[pos.tower][pos.level].push_back(x);
    }
    return out;
}

GridPermutation GridProcess::action(int m) const {
    // Z_m R Z_m^{-1}
    const auto rot = rotation_perm(params_, m, cols_, rows_);
    return compose(z(m), compose(rot, zinv_.at(m)));
}

GridProcess compose_stage(const GridProcess& proc, const HData& h) {
    const int n = proc.stage_;
    if (h.stage != n) throw InputError("h was built for stage " + std::to_string(h.stage) + ", process is at stage " +
                                       std::to_string(n));
    const Params& P = proc.params_;
    GridProcess g;
    g.params_ = P;
    g.cap_ = proc.cap_;
    g.stage_ = n + 1;
    g.hs_ = proc.hs_;
    g.hs_.push_back(h);
    const BigInt cols = P.q[n + 1];
    const BigInt rows = std::lcm(proc.rows_, h.perm.rows);
    if (cols * rows > BigInt(proc.cap_))
        throw ResourceError("stage " + std::to_string(n + 1) + " grid has " + to_string(BigInt(cols * rows)) +
                            " atoms, cap is " + std::to_string(proc.cap_));
    g.cols_ = static_cast<std::uint64_t>(cols);
    g.rows_ = static_cast<std::uint64_t>(rows);
    GridPermutation zm = GridPermutation::identity(g.cols_, g.rows_);
    g.zinv_.push_back(zm);
    for (const auto& hm : g.hs_) {
        zm = compose(zm, hm.perm.refine(g.cols_, g.rows_));
        g.zinv_.push_back(zm.inverse());
    }
    for (int m = 0; m <= n + 1; ++m) g.jtab_.push_back(DynOrder(P, m).table());
    return g;
}

GridProcess simulate(const Params& P, const std::vector<std::vector<std::vector<std::int64_t>>>& words,
                     std::uint64_t cap) {
    GridProcess g = GridProcess::base(P, cap);
    for (std::size_t n = 0; n < words.size(); ++n) g = compose_stage(g, h_from_words(P, static_cast<int>(n), words[n]));
    return g;
}

EpsReport eps_approx(const GridProcess& coarse, const GridProcess& fine) {
    EpsReport rep;
    const int cn = coarse.stage(), fn = fine.stage();
    if (fn < cn || fine.cols() % coarse.cols() || fine.rows() % coarse.rows()) {
        rep.compatible = false;
        rep.eps = rep.minimal = 1;
        return rep;
    }
    const std::uint64_t a = fine.cols() / coarse.cols(), b = fine.rows() / coarse.rows();
    auto coarse_pos = [&](std::uint64_t x) {
        const std::uint64_t c = x / fine.rows(), r = x % fine.rows();
        return coarse.locate(cn, (c / a) * coarse.rows() + r / b);
    };
    const auto fine_towers = fine.towers(fn);
    const std::uint64_t fq = fine.tower_length(fn), cq = coarse.tower_length(cn);
    const std::uint64_t ctowers = coarse.tower_count(cn);
    const Rational level_mass(BigInt(1), BigInt(fine.tower_count(fn) * fq));

    // per coarse level: mass of violators, mass of violators plus fill
    std::vector<std::vector<Rational>> dmin(ctowers, std::vector<Rational>(cq, 0)), dfill = dmin;
    std::vector<std::vector<char>> spacer_pos(static_cast<std::size_t>(fn + 1));
    for (int m = cn + 1; m <= fn; ++m) {
        const auto cp = CircParams::of_stage(fine.params(), m - 1);
        spacer_pos[m].resize(fine.tower_length(m));
        for (std::uint64_t t = 0; t < fine.tower_length(m); ++t)
            spacer_pos[m][t] = classify(cp, t).kind == PositionClass::Boundary;
    }
    const Rational atom_mass(BigInt(1), BigInt(fine.atoms()));
    bool any_ok = false;
    for (std::uint64_t s = 0; s < fine_towers.size(); ++s)
        for (std::uint64_t t = 0; t < fq; ++t) {
            const auto& lvl = fine_towers[s][t];
            const TowerPos home = coarse_pos(lvl.front());
            bool violator = false;
            for (auto x : lvl)
                if (!(coarse_pos(x) == home)) violator = true; // clause 1
            if (!violator && home.level + 1 < cq) {
                for (auto x : fine_towers[s][(t + 1) % fq])
                    if (!(coarse_pos(x) == TowerPos{home.tower, home.level + 1})) violator = true; // clause 2
            }
            bool fill = false;
            for (int m = cn + 1; m <= fn && !fill; ++m) fill = spacer_pos[m][fine.locate(m, lvl.front()).level];
            if (violator) ++rep.violator_levels;
            if (fill) rep.fill_mass += level_mass;
            if (!violator) any_ok = true;
            // a clause-1 violator spreads over several coarse levels; charge each atom where it sits
            for (auto x : lvl) {
                const TowerPos cp = coarse_pos(x);
                if (violator) dmin[cp.tower][cp.level] += atom_mass;
                if (violator || fill) dfill[cp.tower][cp.level] += atom_mass;
            }
        }
    if (!any_ok) {
        rep.compatible = false;
        rep.eps = rep.minimal = 1;
        return rep;
    }
    // the remaining part of each coarse tower must keep equal mass on every level
    auto equalize = [&](const std::vector<std::vector<Rational>>& d) {
        Rational total = 0;
        for (const auto& tower : d) total += *std::max_element(tower.begin(), tower.end()) * static_cast<long long>(cq);
        return std::min(total, Rational(1));
    };
    rep.minimal = equalize(dmin);
    rep.eps = equalize(dfill);
    return rep;
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    default: return "UNVERIFIABLE";
    }
}

bool RequirementsReport::all_pass() const {
    if (growth != Verdict::Pass) return false;
    for (const auto& s : stages)
        if (s.occurrence != Verdict::Pass || s.distinct != Verdict::Pass) return false;
    return true;
}

RequirementsReport check_requirements(const Params& P,
                                      const std::vector<std::vector<std::vector<std::int64_t>>>& words) {
    RequirementsReport rep;
    const int top = std::min<int>(static_cast<int>(words.size()), P.top_stage());
    const std::int64_t first = P.s.front(), last = P.s[static_cast<std::size_t>(top)];
    if (last > first) {
        rep.growth = Verdict::Pass;
        rep.growth_detail = "s grows from " + std::to_string(first) + " to " + std::to_string(last) + " on the prefix";
    } else {
        rep.growth = Verdict::Unverifiable;
        rep.growth_detail = "s does not grow on the supplied prefix; unbounded growth cannot be checked on a prefix";
    }
    for (int n = 0; n < top; ++n) {
        StageRequirements st;
        st.stage = n;
        const auto& ws = words[static_cast<std::size_t>(n)];
        const std::int64_t k = P.k[n], sn = P.s[n], sn1 = P.s[n + 1];
        if (static_cast<std::int64_t>(ws.size()) != sn1) {
            st.occurrence = Verdict::Fail;
            st.occurrence_detail = std::to_string(ws.size()) + " words for s_" + std::to_string(n + 1) + "=" +
                                   std::to_string(sn1);
        }
        for (const auto& w : ws)
            if (auto why = occurrence_problem(w, k, sn); !why.empty() && st.occurrence == Verdict::Pass) {
                st.occurrence = Verdict::Fail;
                st.occurrence_detail = why;
            }
        for (std::size_t a = 0; a < ws.size() && st.distinct == Verdict::Pass; ++a)
            for (std::size_t b = a + 1; b < ws.size(); ++b)
                if (ws[a] == ws[b]) {
                    st.distinct = Verdict::Fail;
                    st.collide_a = a;
                    st.collide_b = b;
                    break;
                }
        // number of admissible words: k! / ((k/s_n)!)^{s_n}
        if (sn > 0 && k % sn == 0) {
            BigInt num = 1, den = 1, f = 1;
            for (std::int64_t i = 1; i <= k; ++i) num *= i;
            for (std::int64_t i = 1; i <= k / sn; ++i) f *= i;
            for (std::int64_t i = 0; i < sn; ++i) den *= f;
            const BigInt admissible = num / den;
            if (admissible < sn1) {
                st.feasible = false;
                st.feasible_detail = "only " + to_string(admissible) + " admissible words exist for " +
                                     std::to_string(sn1) + " towers; occurrence and distinctness cannot both hold";
            }
        }
        rep.stages.push_back(st);
    }
    return rep;
}

void dump_towers(const GridProcess& proc, int m, std::ostream& out) {
    const auto tw = proc.towers(m);
    out << "# stage " << m << " grid " << proc.cols() << "x" << proc.rows() << " towers " << tw.size() << " length "
        << proc.tower_length(m) << "\n";
    for (std::size_t s = 0; s < tw.size(); ++s) {
        out << "tower " << s << ":";
        for (const auto& lvl : tw[s]) {
            out << " [";
            for (std::size_t i = 0; i < lvl.size(); ++i) out << (i ? "," : "") << lvl[i];
            out << "]";
        }
        out << "\n";
    }
}

} // namespace circlesys
