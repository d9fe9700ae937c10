#pragma once

#include "circlesys/ratarith.hpp"
#include "circlesys/words.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace circlesys {

using Tuple = std::vector<std::size_t>;

struct BuildOptions {
    bool strict = false;                               // demand k_n/|W_n| occurrences of every word per tuple
    std::uint64_t materialize_limit = std::uint64_t{1} << 20; // longer words stay lazy
};

struct ConstructionSequence {
    std::int64_t sigma_size = 0; // 0 marks the circle factor (alphabet {*})
    Params params;
    std::vector<std::vector<WordHandle>> levels; // levels[n] = W_n
    std::vector<std::vector<Tuple>> prewords;    // prewords[n] = P_{n+1}, indices into levels[n]
    std::vector<ReadabilityReport> readability;  // per materialized level
    std::vector<std::string> warnings;

    int top() const { return static_cast<int>(levels.size()) - 1; }
    bool materialized(int n) const;
    Word word(int n, std::size_t i) const; // materializes on request
    std::vector<Word> level_words(int n) const;
};

ConstructionSequence build_sequence(std::int64_t sigma_size, const Params& params,
                                    const std::vector<std::vector<Tuple>>& prewords,
                                    const BuildOptions& opt = {});
ConstructionSequence circle_factor_sequence(const Params& params, int top_stage,
                                            const BuildOptions& opt = {});

// Tuples as words over the previous level, scanned for internal occurrences.
ReadabilityReport check_strong_readability(const ConstructionSequence& cs, int n);

struct UniformityReport {
    int stage = 0;
    // counts[a][b] = f(w_a, w'_b) for w_a in W_n, w'_b in W_{n+1}
    std::vector<std::vector<BigInt>> counts;
    Rational ratio;                 // q_{n+1}/q_n
    std::vector<Rational> density;  // d_n(w), the mean of f/ratio over W_{n+1}
    Rational eps;                   // observed max_b sum_a |f/ratio - d_n|
    bool strong = false;
    std::int64_t f_n = 0;           // constant multiplicity when strong
};
UniformityReport verify_uniformity(const ConstructionSequence& cs, int n);

// Number of W_k copies of each kind inside each W_n word, via prewords.
std::vector<std::vector<BigInt>> copy_counts(const ConstructionSequence& cs, int k, int n);

struct CylinderEstimate {
    int word_stage = 0, eval_stage = 0;
    std::size_t target = 0;
    std::vector<Rational> proportion; // one per W_{n+1} word
    Rational gap;                     // max pairwise |difference|
    Rational bound;                   // 2 eps_{n+1}
    bool chain_holds = true;          // each link of the inequality chain, recomputed exactly
};
CylinderEstimate estimate_cylinder(const ConstructionSequence& cs, int k, std::size_t u, int n);

struct SWindowStage {
    int m = 0;
    bool found = false;
    std::uint64_t a = 0, b = 0; // window is x[origin - a, origin + b)
    std::size_t word = 0;
};
struct SWindowResult {
    bool accepted = false;
    int m = 0;                  // largest stage with a witness
    std::uint64_t a = 0, b = 0;
    int first_failure = -1;     // smallest stage without a witness (-1 if none)
    std::string reason;
    std::vector<SWindowStage> stages;
};
SWindowResult in_S_window(const Word& x, std::uint64_t origin, const ConstructionSequence& cs);

// One tuple per line, whitespace-separated indices; '#' comments.
std::vector<Tuple> parse_prewords(std::istream& in, const std::string& source = "<input>");
std::vector<Tuple> load_prewords(const std::string& path);

} // namespace circlesys
