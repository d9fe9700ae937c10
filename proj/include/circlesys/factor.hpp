#pragma once

#include "circlesys/ratarith.hpp"
#include "circlesys/words.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace circlesys {

// Letter-wise collapse onto the circle factor: inner letters become *, spacers stay.
Word collapse_pi(const Word& w);

// r[n] is the origin's offset inside its stage-n word; r[0] is unused.
struct SymbolicPoint {
    std::vector<std::uint64_t> r;
    int top() const { return static_cast<int>(r.size()) - 1; }
    friend bool operator==(const SymbolicPoint&, const SymbolicPoint&) = default;
};

// "-,1,9" style; the leading entry may be '-'.
SymbolicPoint parse_point(const std::string& text);
std::string to_string(const SymbolicPoint& pt);

// Smallest stage at which coherence fails, or nullopt.
std::optional<int> coherence_failure(const Params& params, const SymbolicPoint& pt);
// The point determined by its top offset, descending through interior copies;
// nullopt if some stage lands on a spacer.
std::optional<SymbolicPoint> point_from_top(const Params& params, int top, std::uint64_t offset);

struct RhoTrace {
    std::vector<Rational> rho; // rho[n] for n = 0..top (rho[0] = 0)
    Rational limit;            // rho at the top stage
    Rational error_bound;      // 1/q_top
    bool monotone = true;
    bool cauchy = true;        // rho_{n+1} - rho_n < 1/q_n
};
// throws CoherenceError for incoherent points
RhoTrace rho_trace(const Params& params, const SymbolicPoint& pt);

struct BoundaryCrossing {
    int stage = 0;
};
struct ShiftResult {
    std::optional<SymbolicPoint> point;
    std::optional<BoundaryCrossing> crossing;
};
ShiftResult shift_point(const Params& params, const SymbolicPoint& pt);

} // namespace circlesys
