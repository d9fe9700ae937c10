#pragma once

#include "circlesys/procsim.hpp"
#include "circlesys/words.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace circlesys {

// Path of [0, 1/q_{n+1}) under rotation by alpha_{n+1}, read against I_{k_n q_n}.
// Derived from orbit arithmetic only; it never consults the C layout.
struct TransectLayout {
    enum Kind : char { Begin, Middle, End };
    struct Segment {
        std::uint64_t pass = 0, block = 0;
        std::uint64_t begin = 0, middle = 0, end = 0;
    };
    int stage = 0;                    // maps stage-n names to stage n+1
    std::vector<Kind> kind;           // one per position t < q_{n+1}
    std::vector<std::uint64_t> child; // which child word the orbit is reading
    std::vector<std::uint64_t> inner; // position inside that child's name
    std::vector<Segment> segments;    // per (pass, block), in order
};
TransectLayout transect_layout(const Params& params, int n);

Word transect_word(const Params& params, int n, const std::vector<Word>& children);

// Labels under the stage-<=m labelling: b/e for the latest stage whose layout
// puts the atom on a spacer position, otherwise the stage-0 strip letter.
std::vector<Symbol> atom_labels(const GridProcess& proc, int m);

// Per-level labels of tower s of tau_m; throws OracleMismatch if a level is not
// uniformly labelled.
Word simulate_tower_name(const GridProcess& proc, int m, std::uint64_t s);

// u_{j,s} for j < k_n, read along the orbit order of I^{kq}_j. Requires proc.stage() > n.
std::vector<Word> u_words(const GridProcess& proc, int n, std::uint64_t s);

struct TowerCheck {
    std::uint64_t tower = 0;
    Word simulated, expected;
    bool interior_match = true, full_match = true, children_match = true;
    std::int64_t first_mismatch = -1;
};
// simulated name of every tau_m tower against C(u-words), m >= 1
std::vector<TowerCheck> crosscheck(const GridProcess& proc, int m);

struct StabilityReport {
    Rational label_fraction; // atoms whose [-q_n, q_n] label names agree
    Rational level_fraction; // same with the partition into tau_n levels
    Rational bound;          // 1 - 3/l_n
};
StabilityReport name_stability(const GridProcess& proc, int n);
// Identical processes: both sides use tau_n.
StabilityReport name_stability_self(const GridProcess& proc, int n);

struct DistinctReport {
    bool distinct = true;
    std::uint64_t a = 0, b = 0;
};
DistinctReport distinct_names(const GridProcess& proc, int m);

struct SpacerReport {
    Rational spacer_mass;      // atoms on stage-m spacer positions
    Rational first_time_mass;  // of those, never a spacer before
    std::vector<Rational> gamma; // gamma[n] = mass of Gamma_n within the prefix
};
SpacerReport spacer_report(const GridProcess& proc, int m);

} // namespace circlesys
