#include "circlesys/factor.hpp"
#include "circlesys/errors.hpp"

#include <algorithm>
#include <sstream>

namespace circlesys {

Word collapse_pi(const Word& w) {
    Word out = w;
    for (auto& s : out)
        if (s.is_inner()) s = Symbol::star();
    return out;
}

SymbolicPoint parse_point(const std::string& text) {
    SymbolicPoint pt;
    std::stringstream ss(text);
    std::string tok;
    bool first = true;
    while (std::getline(ss, tok, ',')) {
        const auto b = tok.find_first_not_of(" \t"), e = tok.find_last_not_of(" \t");
        tok = b == std::string::npos ? "" : tok.substr(b, e - b + 1);
        if (first && (tok == "-" || tok.empty())) {
            pt.r.push_back(0);
        } else {
            std::size_t used = 0;
            unsigned long long v = 0;
            try {
                v = std::stoull(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != tok.size() || tok[0] == '-') throw InputError("bad point entry '" + tok + "'");
            pt.r.push_back(v);
        }
        first = false;
    }
    if (pt.r.size() < 2) throw InputError("a point needs at least one stage offset");
    return pt;
}

std::string to_string(const SymbolicPoint& pt) {
    std::string s = "-";
    for (std::size_t n = 1; n < pt.r.size(); ++n) s += "," + std::to_string(pt.r[n]);
    return s;
}

std::optional<int> coherence_failure(const Params& P, const SymbolicPoint& pt) {
    if (pt.top() > P.top_stage()) return pt.top();
    for (int n = 1; n <= pt.top(); ++n) {
        if (pt.r[n] >= P.q64(n)) return n;
        const auto pc = classify(CircParams::of_stage(P, n - 1), pt.r[n]);
        if (pc.kind != PositionClass::Interior) return n;
        if (n >= 2 && pc.inner != pt.r[n - 1]) return n;
    }
    return std::nullopt;
}

std::optional<SymbolicPoint> point_from_top(const Params& P, int top, std::uint64_t offset) {
    if (top < 1 || top > P.top_stage() || offset >= P.q64(top)) throw InputError("offset outside the stage word");
    SymbolicPoint pt;
    pt.r.assign(static_cast<std::size_t>(top) + 1, 0);
    std::uint64_t cur = offset;
    for (int n = top; n >= 1; --n) {
        const auto pc = classify(CircParams::of_stage(P, n - 1), cur);
        if (pc.kind != PositionClass::Interior) return std::nullopt;
        pt.r[n] = cur;
        cur = pc.inner;
    }
    return pt;
}

RhoTrace rho_trace(const Params& P, const SymbolicPoint& pt) {
    // the all-zero point sits on spacers at every stage; it is the base point and maps to 0
    const bool base = std::all_of(pt.r.begin(), pt.r.end(), [](std::uint64_t v) { return v == 0; });
    if (base && pt.top() > P.top_stage()) throw CoherenceError("point beyond the parameter list", P.top_stage() + 1);
    if (auto bad = coherence_failure(P, pt); bad && !base) throw CoherenceError("point " + to_string(pt) + " is not coherent at stage " + std::to_string(*bad), *bad);
    RhoTrace tr;
    tr.rho.push_back(Rational(0));
    for (int n = 1; n <= pt.top(); ++n) {
        const std::uint64_t q = P.q64(n);
        tr.rho.push_back(Rational(BigInt(mulmod(P.p64(n) % q, pt.r[n], q)), BigInt(q)));
    }
    for (int n = 1; n < pt.top(); ++n) {
        if (tr.rho[n + 1] < tr.rho[n]) tr.monotone = false;
        if (!(tr.rho[n + 1] - tr.rho[n] < Rational(BigInt(1), P.q[n]))) tr.cauchy = false;
    }
    tr.limit = tr.rho.back();
    tr.error_bound = Rational(BigInt(1), P.q[pt.top()]);
    return tr;
}

ShiftResult shift_point(const Params& P, const SymbolicPoint& pt) {
    if (auto bad = coherence_failure(P, pt)) throw CoherenceError("point " + to_string(pt) + " is not coherent at stage " + std::to_string(*bad), *bad);
    SymbolicPoint next = pt;
    for (int n = 1; n <= pt.top(); ++n) ++next.r[n];
    ShiftResult res;
    if (auto bad = coherence_failure(P, next))
        res.crossing = BoundaryCrossing{*bad};
    else
        res.point = next;
    return res;
}

} // namespace circlesys
