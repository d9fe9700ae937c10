#include "circlesys/consys.hpp"
#include "circlesys/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace circlesys {

bool ConstructionSequence::materialized(int n) const {
    for (const auto& h : levels.at(n))
        if (!dynamic_cast<const MaterializedWord*>(h.get())) return false;
    return true;
}

Word ConstructionSequence::word(int n, std::size_t i) const {
    const auto& lvl = levels.at(n);
    if (i >= lvl.size()) throw InputError("word index out of range at level " + std::to_string(n));
    if (auto m = dynamic_cast<const MaterializedWord*>(lvl[i].get())) return m->word();
    return lvl[i]->materialize();
}

std::vector<Word> ConstructionSequence::level_words(int n) const {
    std::vector<Word> out;
    for (std::size_t i = 0; i < levels.at(n).size(); ++i) out.push_back(word(n, i));
    return out;
}

namespace {

void add_level(ConstructionSequence& cs, int n, const std::vector<Tuple>& tuples, const BuildOptions& opt) {
    const auto& prev = cs.levels[n];
    const std::uint64_t k = static_cast<std::uint64_t>(cs.params.k[n]);
    std::vector<Tuple> kept;
    std::set<Tuple> seen;
    for (std::size_t row = 0; row < tuples.size(); ++row) {
        const Tuple& t = tuples[row];
        if (t.size() != k)
            throw InputError("preword " + std::to_string(row) + " at stage " + std::to_string(n + 1) +
                             " has arity " + std::to_string(t.size()) + ", expected " + std::to_string(k));
        for (auto idx : t)
            if (idx >= prev.size())
                throw InputError("preword " + std::to_string(row) + " at stage " + std::to_string(n + 1) +
                                 " refers to word " + std::to_string(idx) + " of a level with " +
                                 std::to_string(prev.size()) + " words");
        if (opt.strict) {
            if (k % prev.size() != 0)
                throw ConstraintError("strict mode: k_" + std::to_string(n) + " is not a multiple of |W_" +
                                      std::to_string(n) + "|");
            std::vector<std::uint64_t> occ(prev.size(), 0);
            for (auto idx : t) ++occ[idx];
            for (std::size_t w = 0; w < prev.size(); ++w)
                if (occ[w] != k / prev.size())
                    throw ConstraintError("strict mode: word " + std::to_string(w) + " occurs " +
                                          std::to_string(occ[w]) + " times in preword " + std::to_string(row) +
                                          " at stage " + std::to_string(n + 1) + ", expected " +
                                          std::to_string(k / prev.size()) + " (equal occurrence requirement)");
        }
        if (!seen.insert(t).second) {
            cs.warnings.push_back("duplicate preword tuple at stage " + std::to_string(n + 1) + " line " +
                                  std::to_string(row) + " collapsed; towers will share a name");
            continue;
        }
        kept.push_back(t);
    }
    const CircParams cp = CircParams::of_stage(cs.params, n);
    const bool eager = cp.length() <= opt.materialize_limit;
    std::vector<WordHandle> lvl;
    std::vector<Word> prev_words;
    if (eager) prev_words = cs.level_words(n);
    for (const auto& t : kept) {
        if (eager) {
            std::vector<Word> kids;
            for (auto idx : t) kids.push_back(prev_words[idx]);
            lvl.push_back(make_word(circ(kids, cp)));
        } else {
            std::vector<WordHandle> kids;
            for (auto idx : t) kids.push_back(prev[idx]);
            lvl.push_back(make_lazy(std::move(kids), cp));
        }
    }
    cs.prewords.push_back(kept);
    cs.levels.push_back(std::move(lvl));
    ReadabilityReport rr;
    rr.q_below_half_l = 2 * cp.q < cp.l;
    // exhaustive scan is quadratic in word length; skip it for long words
    if (eager && cp.length() <= 4096) {
        const bool q_small = rr.q_below_half_l;
        rr = check_unique_readability(cs.level_words(n + 1));
        rr.q_below_half_l = q_small;
        if (!rr.readable)
            cs.warnings.push_back("level " + std::to_string(n + 1) + " is not uniquely readable: word " +
                                  std::to_string(rr.w) + " occurs at offset " + std::to_string(rr.offset) +
                                  " of words " + std::to_string(rr.u) + "." + std::to_string(rr.v));
    }
    cs.readability.push_back(rr);
}

} // namespace

ConstructionSequence build_sequence(std::int64_t sigma_size, const Params& params,
                                    const std::vector<std::vector<Tuple>>& prewords, const BuildOptions& opt) {
    if (sigma_size < 1) throw InputError("alphabet must be non-empty");
    if (static_cast<int>(prewords.size()) > params.top_stage())
        throw InputError("prewords given for " + std::to_string(prewords.size()) + " stages but parameters cover " +
                         std::to_string(params.top_stage()));
    ConstructionSequence cs;
    cs.sigma_size = sigma_size;
    cs.params = params;
    std::vector<WordHandle> base;
    for (std::int64_t a = 0; a < sigma_size; ++a) base.push_back(make_word({Symbol::inner(a)}));
    cs.levels.push_back(std::move(base));
    cs.readability.push_back(ReadabilityReport{});
    for (std::size_t n = 0; n < prewords.size(); ++n) add_level(cs, static_cast<int>(n), prewords[n], opt);
    return cs;
}

ConstructionSequence circle_factor_sequence(const Params& params, int top_stage, const BuildOptions& opt) {
    if (top_stage > params.top_stage()) throw InputError("not enough parameter stages for the circle factor");
    ConstructionSequence cs;
    cs.sigma_size = 0;
    cs.params = params;
    cs.levels.push_back({make_word({Symbol::star()})});
    cs.readability.push_back(ReadabilityReport{});
    for (int n = 0; n < top_stage; ++n)
        add_level(cs, n, {Tuple(static_cast<std::size_t>(params.k[n]), 0)}, opt);
    return cs;
}

ReadabilityReport check_strong_readability(const ConstructionSequence& cs, int n) {
    std::vector<Word> lam;
    for (const auto& t : cs.prewords.at(n)) {
        Word w;
        for (auto idx : t) w.push_back(Symbol::inner(static_cast<std::int64_t>(idx)));
        lam.push_back(std::move(w));
    }
    return check_unique_readability(lam);
}

UniformityReport verify_uniformity(const ConstructionSequence& cs, int n) {
    if (n < 0 || n + 1 > cs.top()) throw InputError("uniformity needs levels n and n+1");
    UniformityReport rep;
    rep.stage = n;
    const auto& P = cs.params;
    const BigInt per_copy = P.q[n] * (P.l[n] - 1);
    rep.ratio = Rational(P.q[n + 1], P.q[n]);
    const std::size_t A = cs.levels[n].size(), B = cs.levels[n + 1].size();
    rep.counts.assign(A, std::vector<BigInt>(B, 0));
    std::set<std::int64_t> mults;
    for (std::size_t b = 0; b < B; ++b) {
        std::vector<std::int64_t> occ(A, 0);
        for (auto idx : cs.prewords[n][b]) ++occ[idx];
        for (std::size_t a = 0; a < A; ++a) {
            rep.counts[a][b] = per_copy * occ[a];
            mults.insert(occ[a]);
        }
    }
    rep.density.assign(A, Rational(0));
    for (std::size_t a = 0; a < A; ++a) {
        Rational sum = 0;
        for (std::size_t b = 0; b < B; ++b) sum += Rational(rep.counts[a][b]) / rep.ratio;
        rep.density[a] = B ? sum / Rational(static_cast<long long>(B)) : Rational(0);
    }
    rep.eps = 0;
    for (std::size_t b = 0; b < B; ++b) {
        Rational dev = 0;
        for (std::size_t a = 0; a < A; ++a) dev += abs(Rational(rep.counts[a][b]) / rep.ratio - rep.density[a]);
        rep.eps = std::max(rep.eps, dev);
    }
    rep.strong = mults.size() == 1;
    if (rep.strong) rep.f_n = *mults.begin();
    return rep;
}

std::vector<std::vector<BigInt>> copy_counts(const ConstructionSequence& cs, int k, int n) {
    if (k < 0 || n < k || n > cs.top()) throw InputError("copy_counts needs 0 <= k <= n <= top");
    const std::size_t K = cs.levels[k].size();
    std::vector<std::vector<BigInt>> cur(K, std::vector<BigInt>(K, 0));
    for (std::size_t i = 0; i < K; ++i) cur[i][i] = 1;
    for (int m = k; m < n; ++m) {
        const BigInt per = cs.params.q[m] * (cs.params.l[m] - 1);
        std::vector<std::vector<BigInt>> next;
        for (const auto& t : cs.prewords[m]) {
            std::vector<BigInt> c(K, 0);
            for (auto idx : t)
                for (std::size_t u = 0; u < K; ++u) c[u] += per * cur[idx][u];
            next.push_back(std::move(c));
        }
        cur = std::move(next);
    }
    return cur;
}

CylinderEstimate estimate_cylinder(const ConstructionSequence& cs, int k, std::size_t u, int n) {
    if (k < 0 || k > cs.top() || u >= cs.levels[k].size()) throw InputError("target word is not in level k");
    if (n < k || n + 1 > cs.top()) throw InputError("evaluation stage must satisfy k <= n < top");
    CylinderEstimate est;
    est.word_stage = k;
    est.eval_stage = n;
    est.target = u;
    const auto counts = copy_counts(cs, k, n);
    std::vector<Rational> lambda;
    for (const auto& c : counts) {
        BigInt total = 0;
        for (const auto& x : c) total += x;
        lambda.push_back(total == 0 ? Rational(0) : Rational(c[u], total));
    }
    const UniformityReport ur = verify_uniformity(cs, n);
    const std::size_t A = lambda.size(), B = cs.levels[n + 1].size();
    auto freq = [&](std::size_t a, std::size_t b) { return Rational(ur.counts[a][b]) / ur.ratio; };
    for (std::size_t b = 0; b < B; ++b) {
        Rational s = 0;
        for (std::size_t a = 0; a < A; ++a) s += lambda[a] * freq(a, b);
        est.proportion.push_back(s);
    }
    est.gap = 0;
    est.bound = 2 * ur.eps;
    for (std::size_t b1 = 0; b1 < B; ++b1)
        for (std::size_t b2 = 0; b2 < B; ++b2) {
            const Rational gap = abs(est.proportion[b1] - est.proportion[b2]);
            Rational l1 = 0, l2 = 0, l3 = 0;
            for (std::size_t a = 0; a < A; ++a) {
                const Rational d = abs(freq(a, b1) - freq(a, b2));
                l1 += lambda[a] * d;
                l2 += d;
                l3 += abs(freq(a, b1) - ur.density[a]) + abs(ur.density[a] - freq(a, b2));
            }
            if (!(gap <= l1 && l1 <= l2 && l2 <= l3 && l3 <= est.bound)) est.chain_holds = false;
            est.gap = std::max(est.gap, gap);
        }
    return est;
}

SWindowResult in_S_window(const Word& x, std::uint64_t origin, const ConstructionSequence& cs) {
    SWindowResult res;
    if (origin >= x.size()) throw InputError("origin outside the window");
    const bool any_inner = std::any_of(x.begin(), x.end(), [](Symbol s) { return s.is_inner(); });
    for (int m = 1; m <= cs.top(); ++m) {
        SWindowStage st;
        st.m = m;
        const std::uint64_t len = cs.params.q64(m);
        if (len <= x.size() && cs.materialized(m)) {
            const std::uint64_t lo = origin + 1 >= len ? origin + 1 - len : 0;
            const std::uint64_t hi = std::min<std::uint64_t>(origin, x.size() - len);
            const auto words = cs.level_words(m);
            for (std::uint64_t off = lo; off <= hi && !st.found; ++off)
                for (std::size_t i = 0; i < words.size(); ++i)
                    if (std::equal(words[i].begin(), words[i].end(), x.begin() + off)) {
                        st.found = true;
                        st.a = origin - off;
                        st.b = off + len - origin;
                        st.word = i;
                        break;
                    }
        }
        if (st.found) {
            res.accepted = true;
            res.m = m;
            res.a = st.a;
            res.b = st.b;
        } else if (res.first_failure < 0) {
            res.first_failure = m;
        }
        res.stages.push_back(st);
    }
    if (!any_inner)
        res.reason = "window consists of spacers only";
    else if (!res.accepted)
        res.reason = "no level-" + std::to_string(res.first_failure) + " word covers the origin";
    if (!any_inner) res.accepted = false;
    return res;
}

std::vector<Tuple> parse_prewords(std::istream& in, const std::string& source) {
    std::vector<Tuple> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        Tuple t;
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            long long v = -1;
            try {
                v = std::stoll(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || v < 0)
                throw InputError(source + ":" + std::to_string(lineno) + ": bad index '" + tok + "'");
            t.push_back(static_cast<std::size_t>(v));
        }
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

std::vector<Tuple> load_prewords(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open preword file " + path);
    return parse_prewords(f, path);
}

} // namespace circlesys
