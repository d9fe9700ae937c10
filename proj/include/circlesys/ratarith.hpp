#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace circlesys {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const BigInt& v);
std::string to_string(const Rational& v); // "a/b", or "a" when b == 1

// Coefficients k_n, l_n, s_n and the derived rotation numbers p_n/q_n.
// Stage n runs over 0..k.size(); s has one entry per stage.
struct Params {
    std::vector<std::int64_t> k, l, s;
    std::vector<BigInt> p, q;
    std::vector<Rational> alpha;

    int top_stage() const { return static_cast<int>(q.size()) - 1; }
    // Machine-sized views; throw ResourceError when the value does not fit.
    std::uint64_t q64(int n) const;
    std::uint64_t p64(int n) const;
};

Params derive_params(const std::vector<std::int64_t>& k, const std::vector<std::int64_t>& l,
                     const std::vector<std::int64_t>& s);

// Parse "k = 2 2" style text. Unknown keys and non-integers are InputError;
// the message carries the line number.
Params parse_params(std::istream& in, const std::string& source = "<input>");
Params load_params(const std::string& path);

// Copy with extra stages appended (used when a lazily decoded deeper stage is needed).
Params extend_params(const Params& base, std::int64_t k, std::int64_t l, std::int64_t s);

inline constexpr std::uint64_t kDefaultTableCap = std::uint64_t{1} << 22;

// Modular inverse of a mod m (m >= 1); throws ConstraintError if gcd != 1.
std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m);

// Geometric index i -> dynamical position j_i = p^{-1} i mod q.
class DynOrder {
public:
    DynOrder(const Params& params, int n, std::uint64_t cap = kDefaultTableCap,
             bool materialize = true);

    int stage() const { return n_; }
    std::uint64_t q() const { return q_; }
    std::uint64_t p() const { return p_; }
    std::uint64_t p_inverse() const { return pinv_; }
    bool materialized() const { return !table_.empty(); }

    // j_i for 0 <= i < q
    std::uint64_t j(std::uint64_t i) const;
    // inverse direction: dynamical position t -> geometric index t*p mod q
    std::uint64_t geometric(std::uint64_t t) const;
    const std::vector<std::uint64_t>& table() const { return table_; }

private:
    int n_;
    std::uint64_t q_, p_, pinv_;
    std::vector<std::uint64_t> table_;
};

// Position of x's 1/q_n interval in the dynamical ordering. Requires 0 <= x < 1.
std::uint64_t d_index(const Params& params, int n, const Rational& x);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);

} // namespace circlesys
