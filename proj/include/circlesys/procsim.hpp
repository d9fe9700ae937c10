#pragma once

#include "circlesys/ratarith.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace circlesys {

inline constexpr std::uint64_t kDefaultAtomCap = std::uint64_t{1} << 16;

// Permutation of the atoms of a cols x rows grid on the unit square.
// Atom index = col * rows + row.
struct GridPermutation {
    std::uint64_t cols = 1, rows = 1;
    std::uint64_t stride = 0; // column shift this permutation commutes with
    std::vector<std::uint64_t> to;

    static GridPermutation identity(std::uint64_t cols, std::uint64_t rows);
    std::uint64_t size() const { return cols * rows; }
    std::uint64_t index(std::uint64_t col, std::uint64_t row) const { return col * rows + row; }
    std::uint64_t col(std::uint64_t idx) const { return idx / rows; }
    std::uint64_t row(std::uint64_t idx) const { return idx % rows; }
    std::uint64_t operator()(std::uint64_t idx) const { return to[idx]; }

    GridPermutation inverse() const;
    // Rigid refinement: each atom's sub-atoms are translated with it.
    GridPermutation refine(std::uint64_t new_cols, std::uint64_t new_rows) const;
    bool is_bijective() const;
    bool commutes_with(const GridPermutation& other) const;
    friend bool operator==(const GridPermutation& a, const GridPermutation& b) {
        return a.cols == b.cols && a.rows == b.rows && a.to == b.to;
    }
};

// outer after inner; both must share a resolution
GridPermutation compose(const GridPermutation& outer, const GridPermutation& inner);

// Rotation by p_n/q_n as a column shift.
GridPermutation rotation_perm(const Params& params, int n, std::uint64_t cols, std::uint64_t rows);

// h_{n+1} together with the words it was built from.
struct HData {
    int stage = 0; // built at stage n, so this is h_{n+1}
    std::vector<std::vector<std::int64_t>> words;
    GridPermutation perm; // resolution (k_n q_n, lcm(s_n, s_{n+1}))
    std::vector<std::string> warnings;
};

HData h_from_words(const Params& params, int n, const std::vector<std::vector<std::int64_t>>& words);
// The strip sequence recovered from h: readback[s][t] = strip of h(atom (t, s)).
std::vector<std::vector<std::int64_t>> readback(const HData& h, const Params& params);

struct TowerPos {
    std::uint64_t tower = 0, level = 0;
    friend bool operator==(const TowerPos&, const TowerPos&) = default;
};

class GridProcess {
public:
    static GridProcess base(const Params& params, std::uint64_t cap = kDefaultAtomCap);

    int stage() const { return stage_; }
    const Params& params() const { return params_; }
    std::uint64_t cols() const { return cols_; }
    std::uint64_t rows() const { return rows_; }
    std::uint64_t atoms() const { return cols_ * rows_; }
    std::uint64_t cap() const { return cap_; }
    const std::vector<HData>& hs() const { return hs_; }

    std::uint64_t tower_count(int m) const;
    std::uint64_t tower_length(int m) const;
    // Z_m^{-1} on this grid
    const GridPermutation& z_inverse(int m) const { return zinv_.at(m); }
    GridPermutation z(int m) const { return zinv_.at(m).inverse(); }
    // position of an atom in tau_m, m <= stage
    TowerPos locate(int m, std::uint64_t atom) const;
    // towers[s][t] = sorted atoms of level t of tower s of tau_m
    std::vector<std::vector<std::vector<std::uint64_t>>> towers(int m) const;
    // the successor map of tau_m on atoms: level t -> level t+1, the top returns to the base
    GridPermutation action(int m) const;

    friend GridProcess compose_stage(const GridProcess& proc, const HData& h);

private:
    int stage_ = 0;
    Params params_;
    std::uint64_t cols_ = 1, rows_ = 1, cap_ = kDefaultAtomCap;
    std::vector<HData> hs_;
    std::vector<GridPermutation> zinv_;
    std::vector<std::vector<std::uint64_t>> jtab_;
};

GridProcess compose_stage(const GridProcess& proc, const HData& h);
// Build stages 1..words.size() from per-stage word lists.
GridProcess simulate(const Params& params, const std::vector<std::vector<std::vector<std::int64_t>>>& words,
                     std::uint64_t cap = kDefaultAtomCap);

struct EpsReport {
    bool compatible = true;
    Rational eps;            // D = fill levels plus violators, equalized over coarse levels
    Rational minimal;        // D = violators only, equalized
    Rational fill_mass;      // fine levels that are spacer positions of the fine word layout
    std::uint64_t violator_levels = 0;
};
EpsReport eps_approx(const GridProcess& coarse, const GridProcess& fine);

enum class Verdict { Pass, Fail, Unverifiable };
std::string to_string(Verdict v);

struct StageRequirements {
    int stage = 0; // words for h_{stage+1}
    Verdict occurrence = Verdict::Pass;
    std::string occurrence_detail;
    Verdict distinct = Verdict::Pass;
    std::size_t collide_a = 0, collide_b = 0;
    bool feasible = true; // enough admissible words exist for s_{n+1} distinct ones
    std::string feasible_detail;
};
struct RequirementsReport {
    Verdict growth = Verdict::Unverifiable;
    std::string growth_detail;
    std::vector<StageRequirements> stages;
    bool all_pass() const;
};
RequirementsReport check_requirements(const Params& params,
                                      const std::vector<std::vector<std::vector<std::int64_t>>>& words);

void dump_towers(const GridProcess& proc, int m, std::ostream& out);

} // namespace circlesys
