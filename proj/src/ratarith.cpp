#include "circlesys/ratarith.hpp"
#include "circlesys/errors.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace circlesys {

std::string to_string(const BigInt& v) { return v.str(); }

std::string to_string(const Rational& v) {
    const BigInt num = boost::multiprecision::numerator(v);
    const BigInt den = boost::multiprecision::denominator(v);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

namespace {

std::uint64_t fit64(const BigInt& v, const char* what, int n) {
    if (v < 0 || v > BigInt(std::numeric_limits<std::int64_t>::max()))
        throw ResourceError(std::string(what) + "_" + std::to_string(n) + " exceeds 63 bits");
    return static_cast<std::uint64_t>(v);
}

} // namespace

std::uint64_t Params::q64(int n) const { return fit64(q.at(n), "q", n); }
std::uint64_t Params::p64(int n) const { return fit64(p.at(n), "p", n); }

Params derive_params(const std::vector<std::int64_t>& k, const std::vector<std::int64_t>& l,
                     const std::vector<std::int64_t>& s) {
    if (k.size() != l.size())
        throw InputError("k and l must have the same length");
    if (s.size() != k.size() + 1)
        throw InputError("s must have exactly one more entry than k");
    for (auto v : k)
        if (v < 1) throw InputError("k entries must be positive");
    for (auto v : l)
        if (v < 1) throw InputError("l entries must be positive");
    for (auto v : s)
        if (v < 1) throw InputError("s entries must be positive");

    for (std::size_t n = 0; n < k.size(); ++n) {
        const std::string at = " at stage " + std::to_string(n);
        if (s[n + 1] % s[n] != 0) throw ConstraintError("s_n must divide s_{n+1}" + at);
        if (k[n] % s[n] != 0) throw ConstraintError("s_n must divide k_n" + at);
        BigInt bound = boost::multiprecision::pow(BigInt(s[n]), static_cast<unsigned>(k[n]));
        if (BigInt(s[n + 1]) > bound) throw ConstraintError("s_{n+1} exceeds s_n^k_n" + at);
    }

    Params P;
    P.k = k;
    P.l = l;
    P.s = s;
    P.p.push_back(0);
    P.q.push_back(1);
    for (std::size_t n = 0; n < k.size(); ++n) {
        const BigInt kl = BigInt(k[n]) * l[n];
        P.p.push_back(P.p[n] * P.q[n] * kl + 1);
        P.q.push_back(kl * P.q[n] * P.q[n]);
    }
    for (std::size_t n = 0; n < P.q.size(); ++n) P.alpha.emplace_back(P.p[n], P.q[n]);
    return P;
}

Params parse_params(std::istream& in, const std::string& source) {
    std::vector<std::int64_t> k, l, s;
    bool seen_k = false, seen_l = false, seen_s = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        std::string eq;
        if (!(ls >> eq) || eq != "=") throw InputError(where + "expected '<key> = values'");
        std::vector<std::int64_t>* dst = nullptr;
        if (key == "k") { dst = &k; seen_k = true; }
        else if (key == "l") { dst = &l; seen_l = true; }
        else if (key == "s") { dst = &s; seen_s = true; }
        else throw InputError(where + "unknown key '" + key + "'");
        dst->clear();
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            long long v = 0;
            try {
                v = std::stoll(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) throw InputError(where + "not an integer: '" + tok + "'");
            dst->push_back(v);
        }
    }
    if (!seen_s) throw InputError(source + ": missing 's' line");
    if (!seen_k) k.clear();
    if (!seen_l) l.clear();
    return derive_params(k, l, s);
}

Params load_params(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open parameter file " + path);
    return parse_params(f, path);
}

Params extend_params(const Params& base, std::int64_t k, std::int64_t l, std::int64_t s) {
    auto kk = base.k, ll = base.l, ss = base.s;
    kk.push_back(k);
    ll.push_back(l);
    ss.push_back(s);
    return derive_params(kk, ll, ss);
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
    if (m == 1) return 0;
    __int128 old_r = static_cast<__int128>(a % m), r = m;
    __int128 old_s = 1, s = 0;
    while (r != 0) {
        __int128 quo = old_r / r;
        __int128 t = old_r - quo * r;
        old_r = r;
        r = t;
        t = old_s - quo * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) throw ConstraintError("no modular inverse: gcd(" + std::to_string(a) + ", " +
                                          std::to_string(m) + ") != 1");
    __int128 inv = old_s % static_cast<__int128>(m);
    if (inv < 0) inv += m;
    return static_cast<std::uint64_t>(inv);
}

DynOrder::DynOrder(const Params& params, int n, std::uint64_t cap, bool materialize) : n_(n) {
    if (n < 0 || n > params.top_stage()) throw InputError("stage out of range");
    q_ = params.q64(n);
    p_ = params.p64(n);
    // q_0 = 1: the single interval, with p^{-1} taken as 0
    pinv_ = (q_ == 1) ? 0 : mod_inverse(p_, q_);
    if (!materialize) return;
    if (q_ > cap)
        throw ResourceError("dynamical ordering table for stage " + std::to_string(n) + " has " +
                            std::to_string(q_) + " entries, cap is " + std::to_string(cap));
    table_.resize(q_);
    std::vector<char> hit(q_, 0);
    for (std::uint64_t i = 0; i < q_; ++i) {
        table_[i] = mulmod(pinv_, i, q_);
        if (hit[table_[i]]++) throw ConstraintError("dynamical ordering is not a bijection");
    }
}

std::uint64_t DynOrder::j(std::uint64_t i) const {
    if (i >= q_) throw InputError("geometric index out of range");
    return table_.empty() ? mulmod(pinv_, i, q_) : table_[i];
}

std::uint64_t DynOrder::geometric(std::uint64_t t) const {
    if (t >= q_) throw InputError("dynamical position out of range");
    return mulmod(p_, t, q_);
}

std::uint64_t d_index(const Params& params, int n, const Rational& x) {
    if (x < 0 || x >= 1) throw InputError("d_index needs 0 <= x < 1");
    const BigInt qn = params.q.at(n);
    const Rational scaled = x * Rational(qn);
    const BigInt cell = boost::multiprecision::numerator(scaled) /
                        boost::multiprecision::denominator(scaled);
    if (qn == 1) return 0;
    const BigInt pinv = BigInt(mod_inverse(params.p64(n), params.q64(n)));
    return static_cast<std::uint64_t>((pinv * cell) % qn);
}

} // namespace circlesys
