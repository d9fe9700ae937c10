#include "circlesys/words.hpp"
#include "circlesys/errors.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace circlesys {

Symbol Symbol::inner(std::int64_t id) {
    if (id < 0) throw InputError("inner symbol ids are non-negative");
    return Symbol{id};
}

std::string token(Symbol s) {
    if (s.is_b()) return "b";
    if (s.is_e()) return "e";
    if (s == Symbol::star()) return "*";
    return std::to_string(s.code);
}

Symbol parse_token(const std::string& tok) {
    if (tok == "b") return Symbol::b();
    if (tok == "e") return Symbol::e();
    if (tok == "*") return Symbol::star();
    std::size_t used = 0;
    long long v = -1;
    try {
        v = std::stoll(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || tok.empty() || v < 0) throw InputError("bad word token '" + tok + "'");
    return Symbol::inner(v);
}

std::string to_text(const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        out += token(w[i]);
    }
    return out;
}

Word from_text(const std::string& line) {
    std::istringstream in(line);
    Word w;
    std::string tok;
    while (in >> tok) w.push_back(parse_token(tok));
    return w;
}

std::string compact(const Word& w) {
    std::string out;
    out.reserve(w.size());
    for (auto s : w) {
        if (s.is_inner() && s != Symbol::star() && s.code > 9)
            throw InputError("compact form needs inner ids below 10");
        out += token(s);
    }
    return out;
}

Word from_compact(const std::string& s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) w.push_back(parse_token(std::string(1, c)));
    return w;
}

CircParams CircParams::of_stage(const Params& P, int n) {
    if (n < 0 || n >= P.top_stage()) throw InputError("no operator parameters for stage " + std::to_string(n));
    return make(static_cast<std::uint64_t>(P.k[n]), static_cast<std::uint64_t>(P.l[n]), P.p64(n), P.q64(n));
}

CircParams CircParams::make(std::uint64_t k, std::uint64_t l, std::uint64_t p, std::uint64_t q) {
    if (k < 1 || l < 1 || q < 1) throw InputError("circular operator needs k, l, q >= 1");
    CircParams cp;
    cp.k = k;
    cp.l = l;
    cp.q = q;
    cp.pinv = q == 1 ? 0 : mod_inverse(p % q, q);
    (void)cp.length();
    return cp;
}

std::uint64_t CircParams::length() const {
    unsigned __int128 len = static_cast<unsigned __int128>(k) * l;
    len *= q;
    len *= q;
    if (len > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max()))
        throw ResourceError("circular word length exceeds 63 bits");
    return static_cast<std::uint64_t>(len);
}

PositionClass classify(const CircParams& cp, std::uint64_t m) {
    if (m >= cp.length()) throw InputError("position " + std::to_string(m) + " out of range");
    const std::uint64_t L = cp.block_length();
    const std::uint64_t bi = m / L, off = m % L;
    PositionClass pc;
    pc.pass = bi / cp.k;
    pc.block = bi % cp.k;
    const std::uint64_t lead = cp.q - cp.j(pc.pass);
    const std::uint64_t body = (cp.l - 1) * cp.q;
    if (off < lead) {
        pc.kind = PositionClass::Boundary;
        pc.letter = Symbol::b();
        pc.offset = off;
    } else if (off < lead + body) {
        pc.kind = PositionClass::Interior;
        pc.copy = (off - lead) / cp.q;
        pc.inner = (off - lead) % cp.q;
    } else {
        pc.kind = PositionClass::Boundary;
        pc.letter = Symbol::e();
        pc.offset = off - lead - body;
    }
    return pc;
}

std::string describe(const PositionClass& pc) {
    std::ostringstream o;
    if (pc.kind == PositionClass::Boundary)
        o << "Boundary(" << token(pc.letter) << ", i=" << pc.pass << ", j=" << pc.block
          << ", offset=" << pc.offset << ")";
    else
        o << "Interior(i=" << pc.pass << ", j=" << pc.block << ", r=" << pc.copy << ", t=" << pc.inner
          << ", letter=" << token(pc.letter) << ")";
    return o.str();
}

Word WordSource::materialize(std::uint64_t from, std::uint64_t to) const {
    to = std::min(to, length());
    Word w;
    if (from >= to) return w;
    w.reserve(to - from);
    for (std::uint64_t m = from; m < to; ++m) w.push_back(at(m));
    return w;
}

LazyCircularWord::LazyCircularWord(std::vector<WordHandle> children, CircParams cp)
    : kids_(std::move(children)), cp_(cp), len_(cp.length()) {
    if (kids_.size() != cp_.k) throw InputError("expected " + std::to_string(cp_.k) + " children");
    for (const auto& c : kids_)
        if (!c || c->length() != cp_.q) throw InputError("child length must equal q");
}

PositionClass LazyCircularWord::decode(std::uint64_t m) const {
    PositionClass pc = classify(cp_, m);
    if (pc.kind == PositionClass::Interior) pc.letter = kids_[pc.block]->at(pc.inner);
    return pc;
}

Symbol LazyCircularWord::at(std::uint64_t m) const {
    // iterative descent through the DAG
    const LazyCircularWord* node = this;
    for (;;) {
        PositionClass pc = classify(node->cp_, m);
        if (pc.kind == PositionClass::Boundary) return pc.letter;
        const WordSource* child = node->kids_[pc.block].get();
        m = pc.inner;
        auto lazy = dynamic_cast<const LazyCircularWord*>(child);
        if (!lazy) return child->at(m);
        node = lazy;
    }
}

WordHandle make_word(Word w) { return std::make_shared<MaterializedWord>(std::move(w)); }

WordHandle make_lazy(std::vector<WordHandle> children, const CircParams& cp) {
    return std::make_shared<LazyCircularWord>(std::move(children), cp);
}

Word circ(const std::vector<Word>& children, const CircParams& cp) {
    if (children.size() != cp.k) throw InputError("expected " + std::to_string(cp.k) + " children");
    for (const auto& c : children)
        if (c.size() != cp.q) throw InputError("child length must equal q");
    Word out;
    out.reserve(cp.length());
    for (std::uint64_t i = 0; i < cp.q; ++i) {
        const std::uint64_t ji = cp.j(i);
        for (std::uint64_t j = 0; j < cp.k; ++j) {
            out.insert(out.end(), cp.q - ji, Symbol::b());
            for (std::uint64_t r = 0; r + 1 < cp.l; ++r)
                out.insert(out.end(), children[j].begin(), children[j].end());
            out.insert(out.end(), ji, Symbol::e());
        }
    }
    return out;
}

PositionClass decode_position(const LazyCircularWord& w, std::uint64_t m) { return w.decode(m); }

std::vector<std::pair<std::uint64_t, std::size_t>> parse(const Word& x,
                                                         const std::vector<Word>& dictionary) {
    std::vector<std::pair<std::uint64_t, std::size_t>> hits;
    if (dictionary.empty()) throw InputError("empty dictionary");
    const std::size_t len = dictionary.front().size();
    for (const auto& d : dictionary)
        if (d.size() != len) throw InputError("dictionary words must share one length");
    if (len == 0 || x.size() < len) return hits;
    for (std::size_t off = 0; off + len <= x.size(); ++off)
        for (std::size_t i = 0; i < dictionary.size(); ++i)
            if (std::equal(dictionary[i].begin(), dictionary[i].end(), x.begin() + off))
                hits.emplace_back(off, i);
    return hits;
}

ReadabilityReport check_unique_readability(const std::vector<Word>& level) {
    ReadabilityReport rep;
    if (level.empty()) return rep;
    const std::size_t len = level.front().size();
    for (std::size_t u = 0; u < level.size(); ++u)
        for (std::size_t v = 0; v < level.size(); ++v) {
            Word uv = level[u];
            uv.insert(uv.end(), level[v].begin(), level[v].end());
            for (auto [off, w] : parse(uv, level)) {
                if (off == 0 || off == len) continue;
                rep.readable = false;
                rep.u = u;
                rep.v = v;
                rep.w = w;
                rep.offset = off;
                return rep;
            }
        }
    return rep;
}

namespace {

// Count of positions within q of a spacer, computed from the run layout.
std::uint64_t near_count(const CircParams& cp) {
    const std::uint64_t len = cp.length(), L = cp.block_length(), body = (cp.l - 1) * cp.q;
    std::uint64_t covered = 0, reach = 0; // union of expanded runs, scanned left to right
    auto add = [&](std::uint64_t a, std::uint64_t b) { // spacer run [a, b)
        if (a >= b) return;
        std::uint64_t lo = a > cp.q ? a - cp.q : 0;
        std::uint64_t hi = std::min(len, b + cp.q);
        lo = std::max(lo, reach);
        if (hi > lo) covered += hi - lo;
        reach = std::max(reach, hi);
    };
    for (std::uint64_t i = 0; i < cp.q; ++i) {
        const std::uint64_t lead = cp.q - cp.j(i);
        for (std::uint64_t j = 0; j < cp.k; ++j) {
            const std::uint64_t base = (i * cp.k + j) * L;
            add(base, base + lead);
            add(base + lead + body, base + L);
        }
    }
    return covered;
}

BoundaryStats stats_for(const CircParams& cp) {
    const std::uint64_t len = cp.length();
    BoundaryStats st;
    st.boundary = Rational(BigInt(cp.k * cp.q * cp.q), BigInt(len));
    st.near_boundary = Rational(BigInt(near_count(cp)), BigInt(len));
    return st;
}

} // namespace

BoundaryStats boundary_stats(const Word& w, const CircParams& cp) {
    if (w.size() != cp.length()) throw InputError("word length is not k*l*q^2; not a circular image");
    std::vector<Word> child(cp.k);
    std::uint64_t spacers = 0;
    for (std::uint64_t m = 0; m < w.size(); ++m) {
        PositionClass pc = classify(cp, m);
        if (pc.kind == PositionClass::Boundary) {
            if (w[m] != pc.letter)
                throw InputError("position " + std::to_string(m) + " should be " + token(pc.letter) +
                                 "; not a circular image");
            ++spacers;
            continue;
        }
        Word& c = child[pc.block];
        if (c.size() < cp.q) {
            c.push_back(w[m]);
        } else if (c[pc.inner] != w[m]) {
            throw InputError("copies of child " + std::to_string(pc.block) +
                             " disagree at position " + std::to_string(m) + "; not a circular image");
        }
    }
    BoundaryStats st = stats_for(cp);
    if (st.boundary != Rational(BigInt(spacers), BigInt(w.size())))
        throw OracleMismatch("spacer count disagrees with layout arithmetic");
    return st;
}

BoundaryStats boundary_stats(const LazyCircularWord& w) { return stats_for(w.params()); }

} // namespace circlesys
