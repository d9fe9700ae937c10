#pragma once
// Slow, independent reference computations used to derive expected values.
// Nothing here calls into the library's arithmetic.

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

// p, q recursion in unsigned 128-bit arithmetic (enough for desk parameters).
struct PQ {
    std::vector<unsigned __int128> p, q;
};
inline PQ recursion(const std::vector<int>& k, const std::vector<int>& l) {
    PQ r;
    r.p.push_back(0);
    r.q.push_back(1);
    for (std::size_t n = 0; n < k.size(); ++n) {
        unsigned __int128 kl = static_cast<unsigned __int128>(k[n]) * l[n];
        r.p.push_back(r.p[n] * r.q[n] * kl + 1);
        r.q.push_back(kl * r.q[n] * r.q[n]);
    }
    return r;
}

// j_i by search: the t with t*p == i (mod q).
inline std::uint64_t j_by_search(std::uint64_t p, std::uint64_t q, std::uint64_t i) {
    if (q == 1) return 0;
    for (std::uint64_t t = 0; t < q; ++t)
        if ((t * p) % q == i) return t;
    return UINT64_MAX;
}

// Dynamical ordering by literally rotating interval 0: position t holds interval t*p mod q.
inline std::vector<std::uint64_t> j_by_orbit(std::uint64_t p, std::uint64_t q) {
    std::vector<std::uint64_t> j(q, 0);
    std::uint64_t cur = 0;
    for (std::uint64_t t = 0; t < q; ++t) {
        j[cur] = t;
        cur = (cur + p) % q;
    }
    return j;
}

// The circular operator on strings of single-character letters.
inline std::string circ(const std::vector<std::string>& w, int l, std::uint64_t p, std::uint64_t q) {
    std::string out;
    auto jt = j_by_orbit(p, q);
    for (std::uint64_t i = 0; i < q; ++i)
        for (const auto& wj : w) {
            out += std::string(q - jt[i], 'b');
            for (int r = 0; r + 1 < l; ++r) out += wj;
            out += std::string(jt[i], 'e');
        }
    return out;
}

inline std::vector<std::size_t> find_all(const std::string& hay, const std::string& needle) {
    std::vector<std::size_t> at;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1))
        at.push_back(pos);
    return at;
}

} // namespace oracle
