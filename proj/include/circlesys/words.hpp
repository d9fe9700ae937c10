#pragma once

#include "circlesys/ratarith.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace circlesys {

// Letter of Σ ∪ {b, e}. Inner letters carry a non-negative id; the circle
// factor's single inner letter is the dedicated star.
struct Symbol {
    std::int64_t code = 0;

    static Symbol inner(std::int64_t id);
    static Symbol b() { return Symbol{-1}; }
    static Symbol e() { return Symbol{-2}; }
    static Symbol star() { return Symbol{-3}; }

    bool is_b() const { return code == -1; }
    bool is_e() const { return code == -2; }
    bool is_spacer() const { return code == -1 || code == -2; }
    bool is_inner() const { return !is_spacer(); }

    friend bool operator==(Symbol a, Symbol b) { return a.code == b.code; }
    friend bool operator!=(Symbol a, Symbol b) { return a.code != b.code; }
    friend bool operator<(Symbol a, Symbol b) { return a.code < b.code; }
};

using Word = std::vector<Symbol>;

std::string token(Symbol s);
Symbol parse_token(const std::string& tok);
// Space-separated tokens; `b`, `e`, `*` reserved.
std::string to_text(const Word& w);
Word from_text(const std::string& line);
// One character per letter; only for inner ids below 10 (test and CLI convenience).
std::string compact(const Word& w);
Word from_compact(const std::string& s);

// Parameters of one application of the circular operator.
struct CircParams {
    std::uint64_t k = 1, l = 1, q = 1, pinv = 0;

    static CircParams of_stage(const Params& P, int n); // maps W_n words to W_{n+1}
    static CircParams make(std::uint64_t k, std::uint64_t l, std::uint64_t p, std::uint64_t q);
    std::uint64_t j(std::uint64_t i) const { return q == 1 ? 0 : mulmod(pinv, i, q); }
    std::uint64_t block_length() const { return l * q; }
    std::uint64_t length() const; // k l q^2, overflow-checked
};

struct PositionClass {
    enum Kind { Boundary, Interior } kind = Boundary;
    Symbol letter;              // b or e for Boundary; the decoded letter for Interior
    std::uint64_t pass = 0;     // i < q
    std::uint64_t block = 0;    // j < k
    std::uint64_t offset = 0;   // Boundary: index inside the b-run or e-run
    std::uint64_t copy = 0;     // Interior: r < l-1
    std::uint64_t inner = 0;    // Interior: t < q

    friend bool operator==(const PositionClass&, const PositionClass&) = default;
};

// Pure arithmetic layout of a position, without touching any child word.
PositionClass classify(const CircParams& cp, std::uint64_t m);
std::string describe(const PositionClass& pc);

class WordSource {
public:
    virtual ~WordSource() = default;
    virtual std::uint64_t length() const = 0;
    virtual Symbol at(std::uint64_t m) const = 0;
    Word materialize(std::uint64_t from = 0, std::uint64_t to = UINT64_MAX) const;
};
using WordHandle = std::shared_ptr<const WordSource>;

class MaterializedWord final : public WordSource {
public:
    explicit MaterializedWord(Word w) : w_(std::move(w)) {}
    std::uint64_t length() const override { return w_.size(); }
    Symbol at(std::uint64_t m) const override { return w_.at(m); }
    const Word& word() const { return w_; }

private:
    Word w_;
};

// C(children) held as a DAG node; letters are decoded on demand.
class LazyCircularWord final : public WordSource {
public:
    LazyCircularWord(std::vector<WordHandle> children, CircParams cp);
    std::uint64_t length() const override { return len_; }
    Symbol at(std::uint64_t m) const override;
    PositionClass decode(std::uint64_t m) const;
    const std::vector<WordHandle>& children() const { return kids_; }
    const CircParams& params() const { return cp_; }

private:
    std::vector<WordHandle> kids_;
    CircParams cp_;
    std::uint64_t len_;
};

WordHandle make_word(Word w);
WordHandle make_lazy(std::vector<WordHandle> children, const CircParams& cp);

Word circ(const std::vector<Word>& children, const CircParams& cp);
PositionClass decode_position(const LazyCircularWord& w, std::uint64_t m);

// Every occurrence of a dictionary word in x, as (offset, dictionary index),
// ordered by offset then index.
std::vector<std::pair<std::uint64_t, std::size_t>> parse(const Word& x,
                                                         const std::vector<Word>& dictionary);

struct ReadabilityReport {
    bool readable = true;
    bool q_below_half_l = false; // q < l/2 for the operator that produced the level
    // first witness: (u, v, w, offset) with w found inside uv at a forbidden offset
    std::size_t u = 0, v = 0, w = 0;
    std::uint64_t offset = 0;
};
// Exhaustive scan of all ordered concatenations uv for internal occurrences.
ReadabilityReport check_unique_readability(const std::vector<Word>& level);

struct BoundaryStats {
    Rational boundary;      // exactly 1/l for a C-image
    Rational near_boundary; // within q letters of a boundary letter
};
// Validates the C-layout (spacers placed correctly, copies of each child
// identical) and throws InputError if w is not a C-image for cp.
BoundaryStats boundary_stats(const Word& w, const CircParams& cp);
BoundaryStats boundary_stats(const LazyCircularWord& w);

} // namespace circlesys
