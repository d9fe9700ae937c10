#include "circlesys/runner.hpp"
#include "circlesys/errors.hpp"
#include "circlesys/factor.hpp"
#include "circlesys/names.hpp"
#include "circlesys/smoothreal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace circlesys {

namespace {

namespace fs = std::filesystem;
using StripWords = std::vector<std::vector<std::vector<std::int64_t>>>;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}
std::string fmt(const Rational& v) { return to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

Rational frac(const Rational& x) {
    BigInt fl = numerator(x) / denominator(x);
    if (x < 0 && fl * denominator(x) != numerator(x)) fl -= 1;
    return x - Rational(fl);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

std::uint64_t parse_u64(const std::string& v, const std::string& where) {
    std::size_t used = 0;
    unsigned long long x = 0;
    try {
        x = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || v[0] == '-') throw InputError(where + "expected a non-negative integer, got '" + v + "'");
    return x;
}

// shared state of one check run
class Context {
public:
    explicit Context(const RunInputs& in) : in_(in) {}
    const Params& P() const { return in_.params; }
    int stages() const { return static_cast<int>(in_.prewords.size()); }
    std::uint64_t seed() const { return in_.seed; }
    const StripWords& words() {
        if (strips_.empty()) strips_ = as_strip_words(in_.prewords);
        return strips_;
    }
    const ConstructionSequence& seq() {
        if (!cs_) cs_ = build_sequence(P().s.at(0), P(), in_.prewords);
        return *cs_;
    }
    // the process through stage m
    const GridProcess& proc(int m) {
        if (!procs_.count(m)) {
            StripWords prefix(words().begin(), words().begin() + m);
            procs_.emplace(m, simulate(P(), prefix, in_.cap_atoms));
        }
        return procs_.at(m);
    }

private:
    const RunInputs& in_;
    StripWords strips_;
    std::optional<ConstructionSequence> cs_;
    std::map<int, GridProcess> procs_;
};

class Sink {
public:
    explicit Sink(CheckResult& r) : r_(r) {}
    void check(const std::string& name, bool pass, const std::string& value, const std::string& bound,
               const std::string& violates) {
        r_.lines.push_back({r_.check + "." + name, pass, value, bound, pass ? "" : violates});
    }
    void note(const std::string& name, const std::string& text) { r_.notes.push_back({r_.check + "." + name, text}); }

private:
    CheckResult& r_;
};

std::string sn(int n) { return std::to_string(n); }

void check_recursion(Context& cx, Sink& out) {
    const Params& P = cx.P();
    for (int n = 0; n < P.top_stage(); ++n) {
        const BigInt q = BigInt(P.k[n]) * P.l[n] * P.q[n] * P.q[n];
        const BigInt p = P.p[n] * P.k[n] * P.l[n] * P.q[n] + 1;
        out.check("q" + sn(n + 1), P.q[n + 1] == q, to_string(P.q[n + 1]), to_string(q), "q_{n+1} = k l q_n^2");
        out.check("p" + sn(n + 1), P.p[n + 1] == p, to_string(P.p[n + 1]), to_string(p), "p_{n+1} = p_n k l q_n + 1");
        const Rational gap = P.alpha[n + 1] - P.alpha[n], want(BigInt(1), P.q[n + 1]);
        out.check("gap" + sn(n + 1), gap == want, fmt(gap), fmt(want), "consecutive rotation numbers differ by 1/q_{n+1}");
    }
}

void check_numerology(Context& cx, Sink& out) {
    const Params& P = cx.P();
    for (int n = 1; n <= P.top_stage(); ++n) {
        const DynOrder d(P, n);
        const std::uint64_t q = d.q();
        std::uint64_t good = 0;
        for (std::uint64_t i = 1; i < q; ++i)
            if (q - d.j(i) == d.j(q - i)) ++good;
        out.check("stage" + sn(n), good == q - 1, fmt(good), fmt(q - 1), "q - j_i = j_{q-i} for 0 < i < q");
    }
}

void check_length(Context& cx, Sink& out) {
    const auto& cs = cx.seq();
    for (int n = 1; n <= cs.top(); ++n) {
        const std::uint64_t want = CircParams::of_stage(cs.params, n - 1).length();
        std::uint64_t good = 0;
        for (const auto& w : cs.levels[n])
            if (w->length() == want) ++good;
        out.check("stage" + sn(n), good == cs.levels[n].size(), fmt(good), fmt(cs.levels[n].size()),
                  "every circular word has length k l q^2");
    }
}

void check_readability(Context& cx, Sink& out) {
    const auto& cs = cx.seq();
    for (int n = 1; n <= cs.top(); ++n) {
        if (!cs.materialized(n)) {
            out.note("stage" + sn(n), "not materialized, skipped");
            continue;
        }
        const auto rep = check_unique_readability(cs.level_words(n));
        if (cs.params.q64(n - 1) < 2) {
            // q = 1 blocks are b w^{l-1} and may overlap; reported, not checked
            out.note("stage" + sn(n), std::string(rep.readable ? "readable" : "not readable") + " (operator with q=1)");
            continue;
        }
        std::string v = rep.readable ? "readable" : "witness(" + fmt(rep.u) + "," + fmt(rep.v) + "," + fmt(rep.w) + ")@" + fmt(rep.offset);
        out.check("stage" + sn(n), rep.readable, v, "readable", "occurrences of level words only at block offsets");
    }
}

void check_boundary(Context& cx, Sink& out) {
    const auto& cs = cx.seq();
    for (int n = 1; n <= cs.top(); ++n) {
        const auto cp = CircParams::of_stage(cs.params, n - 1);
        const Rational want(BigInt(1), BigInt(cs.params.l[n - 1])), near_bound = 3 * want;
        for (std::size_t i = 0; i < cs.levels[n].size(); ++i) {
            BoundaryStats st;
            if (const auto* lazy = dynamic_cast<const LazyCircularWord*>(cs.levels[n][i].get()))
                st = boundary_stats(*lazy);
            else
                st = boundary_stats(cs.word(n, i), cp);
            const std::string tag = "stage" + sn(n) + ".w" + fmt(i);
            out.check(tag + ".spacers", st.boundary == want, fmt(st.boundary), fmt(want), "spacer fraction 1/l_n");
            out.check(tag + ".near", st.near_boundary <= near_bound, fmt(st.near_boundary), fmt(near_bound),
                      "near-boundary fraction at most 3/l_n");
        }
    }
}

void check_uniformity(Context& cx, Sink& out) {
    const auto& cs = cx.seq();
    const Params& P = cs.params;
    for (int n = 0; n < cs.top(); ++n) {
        const auto u = verify_uniformity(cs, n);
        out.check("stage" + sn(n) + ".strong", u.strong, u.strong ? "f=" + std::to_string(u.f_n) : "eps=" + fmt(u.eps),
                  "constant f", "every W_n word occurs equally often in every W_{n+1} word");
        if (u.strong) {
            const Rational d = Rational(u.f_n, P.k[n]) * (1 - Rational(1, P.l[n]));
            bool ok = true;
            for (const auto& x : u.density) ok = ok && x == d;
            out.check("stage" + sn(n) + ".density", ok, fmt(u.density.front()), fmt(d), "d_n = (f_n/k_n)(1 - 1/l_n)");
        }
    }
    if (cs.top() >= 2) {
        const auto est = estimate_cylinder(cs, 0, 0, 1);
        out.check("cylinder", est.gap <= est.bound && est.chain_holds, fmt(est.gap), fmt(est.bound),
                  "cylinder frequencies within 2 eps across words");
    }
}

void check_process(Context& cx, Sink& out) {
    const int N = cx.stages();
    const GridProcess& g = cx.proc(N);
    const Params& P = cx.P();
    for (int m = 0; m <= N; ++m) {
        const auto tw = g.towers(m);
        std::vector<char> seen(g.atoms(), 0);
        bool shape = tw.size() == static_cast<std::size_t>(P.s[m]);
        std::uint64_t covered = 0;
        for (const auto& tower : tw) {
            shape = shape && tower.size() == P.q64(m);
            for (const auto& lvl : tower)
                for (auto x : lvl)
                    if (!seen[x]) {
                        seen[x] = 1;
                        ++covered;
                    } else {
                        shape = false;
                    }
        }
        out.check("towers" + sn(m), shape && covered == g.atoms(), fmt(covered), fmt(g.atoms()),
                  "s_n towers of height q_n partition the grid");
    }
    for (int m = 1; m <= N; ++m) {
        const auto& h = g.hs()[m - 1];
        const bool comm = h.perm.refine(g.cols(), g.rows()).commutes_with(rotation_perm(P, m - 1, g.cols(), g.rows()));
        out.check("commute" + sn(m), comm, comm ? "yes" : "no", "yes", "h_n commutes with the stage rotation");
        const bool rb = readback(h, P) == cx.words()[m - 1];
        out.check("readback" + sn(m), rb, rb ? "equal" : "differs", "equal", "h_n reproduces its strip sequences");
    }
}

void check_eps(Context& cx, Sink& out) {
    const Params& P = cx.P();
    for (int m = 0; m < cx.stages(); ++m) {
        const auto e = eps_approx(cx.proc(m), cx.proc(m + 1));
        const Rational bound(BigInt(1), BigInt(P.l[m]));
        out.check("stage" + sn(m), e.compatible && e.eps <= bound, fmt(e.eps), fmt(bound),
                  "the finer process approximates the coarser off a small set");
        out.note("stage" + sn(m), "minimal=" + fmt(e.minimal) + " fill=" + fmt(e.fill_mass));
    }
}

void check_names(Context& cx, Sink& out) {
    const int N = cx.stages();
    const GridProcess& g = cx.proc(N);
    const Params& P = cx.P();
    for (int m = 1; m <= N; ++m) {
        std::uint64_t full = 0, total = 0;
        for (const auto& tc : crosscheck(g, m)) {
            ++total;
            if (tc.full_match && tc.interior_match) ++full;
        }
        out.check("oracle" + sn(m), full == total, fmt(full), fmt(total), "tower names equal the circular word of their children");
        const auto sp = spacer_report(g, m);
        const Rational want(BigInt(1), BigInt(P.l[m - 1]));
        out.check("spacers" + sn(m), sp.spacer_mass == want, fmt(sp.spacer_mass), fmt(want), "spacer mass 1/l_n");
    }
}

void check_stability(Context& cx, Sink& out) {
    const int N = cx.stages();
    const GridProcess& g = cx.proc(N);
    for (int n = 0; n < N; ++n) {
        const auto r = name_stability(g, n);
        out.check("stage" + sn(n), r.label_fraction >= r.bound && r.level_fraction >= r.bound, fmt(r.label_fraction),
                  fmt(r.bound), "names agree on all but 3/l_n of the space");
    }
}

void check_distinct(Context& cx, Sink& out) {
    const int N = cx.stages();
    const GridProcess& g = cx.proc(N);
    for (int m = 1; m <= N; ++m) {
        const auto d = distinct_names(g, m);
        out.check("stage" + sn(m), d.distinct, d.distinct ? "distinct" : "towers " + fmt(d.a) + "," + fmt(d.b), "distinct",
                  "distinct towers carry distinct names");
    }
}

void check_requirements_(Context& cx, Sink& out) {
    const auto r = check_requirements(cx.P(), cx.words());
    if (r.growth == Verdict::Unverifiable)
        out.note("growth", "unverifiable at finite stages: " + r.growth_detail);
    else
        out.check("growth", r.growth == Verdict::Pass, to_string(r.growth), "PASS", "the tower counts s_n grow without bound");
    for (const auto& s : r.stages) {
        const std::string tag = "stage" + sn(s.stage + 1);
        out.check(tag + ".occurrence", s.occurrence == Verdict::Pass,
                  s.occurrence == Verdict::Pass ? "PASS" : s.occurrence_detail, "PASS",
                  "each strip occurs k_n/s_n times in every strip sequence");
        out.check(tag + ".distinct", s.distinct == Verdict::Pass,
                  s.distinct == Verdict::Pass ? "PASS" : "words " + fmt(s.collide_a) + "," + fmt(s.collide_b), "PASS",
                  "distinct words get distinct strip sequences");
        if (!s.feasible) out.note(tag + ".feasible", s.feasible_detail);
    }
}

void check_factor(Context& cx, Sink& out) {
    const Params& P = cx.P();
    const int top = std::min(P.top_stage(), 2);
    std::uint64_t total = 0, good = 0;
    for (int t = 1; t <= top; ++t)
        for (std::uint64_t off = 0; off < P.q64(t); ++off) {
            auto pt = point_from_top(P, t, off);
            if (!pt) continue;
            ++total;
            const auto tr = rho_trace(P, *pt);
            bool ok = tr.monotone && tr.cauchy;
            for (int n = 1; n <= t; ++n) ok = ok && d_index(P, n, tr.limit) == pt->r[n];
            const auto sh = shift_point(P, *pt);
            if (sh.point) {
                const auto tr2 = rho_trace(P, *sh.point);
                for (int n = 1; n <= t; ++n) ok = ok && frac(tr2.rho[n] - tr.rho[n]) == P.alpha[n];
            }
            if (ok) ++good;
        }
    out.check("points", good == total, fmt(good), fmt(total),
              "rho is monotone, Cauchy, inverts d_index and advances by alpha under the shift");
}

void check_smoothing(Context& cx, Sink& out) {
    const std::uint64_t seed = cx.seed();
    SwapSpec spec;
    spec.delta = 0.05;
    const auto sw = approx_swap(spec);
    const auto ob = measure_obedience(sw, {1, 0}, 2, 1, Rect{}, 10000, seed);
    out.check("swap", ob.fraction >= 0.95, fmt(ob.fraction), fmt(0.95), "an approximate swap exchanges all but delta of the cells");

    std::mt19937_64 rng(seed);
    std::uint64_t good = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t m = 1 + rng() % 5, n = 1 + rng() % 5;
        std::vector<std::uint64_t> sigma(m * n);
        for (std::uint64_t i = 0; i < m * n; ++i) sigma[i] = i;
        std::shuffle(sigma.begin(), sigma.end(), rng);
        const auto swaps = perm_to_swaps(sigma);
        bool ok = swaps.size() <= m * n * m * n;
        for (std::uint64_t c = 0; c < m * n; ++c) {
            std::uint64_t x = c;
            for (auto [a, b] : swaps) x = x == a ? b : x == b ? a : x;
            ok = ok && x == sigma[c];
        }
        if (ok) ++good;
    }
    out.check("decompose", good == 100, fmt(good), fmt(std::uint64_t{100}), "adjacent transpositions recompose the permutation");

    std::vector<std::uint64_t> sigma(16);
    for (std::uint64_t i = 0; i < 16; ++i) sigma[i] = i;
    std::shuffle(sigma.begin(), sigma.end(), rng);
    double frac_ok = 0;
    std::string value;
    PlaneMap realized;
    try {
        const auto r = realize_perm(sigma, 4, 4, 0.1, 100000, seed + 1);
        frac_ok = r.report.fraction;
        value = fmt(frac_ok);
        realized = r.map;
    } catch (const ToleranceError& e) {
        value = "tolerance " + fmt(e.achieved);
    }
    out.check("realize", frac_ok >= 0.9, value, fmt(0.9), "the realized map obeys the permutation off eps");

    const auto j1 = sample_jacobian(sw, 20000, seed + 2), j2 = sample_jacobian(realized, 20000, seed + 3);
    const double dev = std::max(j1.max_dev, j2.max_dev);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", dev);
    out.check("jacobian", dev < 1e-6, buf, "1e-06", "smooth maps preserve area");
}

void check_stagemap(Context& cx, Sink& out) {
    const Params& P = cx.P();
    if (cx.stages() < 1) {
        out.note("trajectory", "needs stage-1 word data");
        return;
    }
    const double eps = 0.05;
    SmoothConfig cfg;
    cfg.seed = cx.seed();
    cfg.eps = eps / static_cast<double>(P.q64(1) + 1);
    const auto s1 = stage_map(P, cx.words(), 1, cfg);
    const auto tm = trajectory_match(s1, cx.proc(1), 10000, cx.seed());
    out.check("trajectory", tm.match_fraction >= 1 - eps, fmt(tm.match_fraction), fmt(1 - eps),
              "smooth orbits visit the cells of the simulated tower");
    if (cx.stages() < 2) {
        out.note("proximity", "needs stage-2 word data");
        return;
    }
    // same data with l_1 sixteen times larger
    auto l = P.l;
    l[1] *= 16;
    const Params big = derive_params(P.k, l, P.s);
    SmoothConfig pc;
    pc.seed = cx.seed();
    const auto base = stage_map(P, cx.words(), 1, pc);
    const auto a = sampled_proximity(stage_map(P, cx.words(), 2, pc), base, 10000, cx.seed());
    const auto b = sampled_proximity(stage_map(big, cx.words(), 2, pc), base, 10000, cx.seed());
    out.check("proximity", b.ky_fan < a.ky_fan, fmt(b.ky_fan), fmt(a.ky_fan),
              "consecutive smooth stage maps draw closer as l grows");
    out.note("proximity", "sup " + fmt(a.sup) + " -> " + fmt(b.sup) + ", mean " + fmt(a.mean) + " -> " + fmt(b.mean));
}

void check_controls(Context&, Sink& out) {
    const Params desk = derive_params({2, 2}, {4, 4}, {2, 2, 2});
    const auto skew = build_sequence(2, desk, {{{0, 1}, {0, 0}}});
    const auto u = verify_uniformity(skew, 0);
    out.check("skewed", !u.strong, u.strong ? "uniform" : "eps=" + fmt(u.eps), "not uniform",
              "skewed prewords must fail strong uniformity");

    const Params dup = derive_params({2, 2}, {4, 4}, {2, 2, 4});
    const auto r = check_requirements(dup, {{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}, {0, 1}, {1, 0}}});
    const bool caught = r.stages.size() == 2 && r.stages[1].distinct == Verdict::Fail;
    out.check("duplicate", caught, caught ? "words " + fmt(r.stages[1].collide_a) + "," + fmt(r.stages[1].collide_b) : "missed",
              "collision", "duplicated words must fail distinctness");

    const auto cs = build_sequence(2, desk, {{{0, 1}, {1, 0}}});
    const auto w = in_S_window(Word(20, Symbol::b()), 5, cs);
    out.check("all_b", !w.accepted, w.accepted ? "accepted" : "refused", "refused", "a window of spacers alone is excluded");
}

using CheckFn = void (*)(Context&, Sink&);
const std::map<std::string, CheckFn>& registry() {
    static const std::map<std::string, CheckFn> r = {
        {"boundary", check_boundary},   {"controls", check_controls},
        {"distinct", check_distinct},   {"eps", check_eps},
        {"factor", check_factor},       {"length", check_length},
        {"names", check_names},         {"numerology", check_numerology},
        {"process", check_process},     {"readability", check_readability},
        {"recursion", check_recursion}, {"requirements", check_requirements_},
        {"smoothing", check_smoothing}, {"stability", check_stability},
        {"stagemap", check_stagemap},   {"uniformity", check_uniformity},
    };
    return r;
}

} // namespace

RunManifest parse_manifest(std::istream& in, const std::string& source, const std::string& base_dir) {
    RunManifest m;
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() || base_dir.empty() ? p : (fs::path(base_dir) / path).lexically_normal().string();
    };
    std::string line;
    int lineno = 0;
    bool have_params = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError(where + "expected key = value");
        const auto key = split_ws(line.substr(0, eq));
        const auto vals = split_ws(line.substr(eq + 1));
        if (key.size() != 1) throw InputError(where + "expected one key");
        const std::string& k = key[0];
        auto one = [&]() -> const std::string& {
            if (vals.size() != 1) throw InputError(where + "'" + k + "' takes one value");
            return vals[0];
        };
        if (k == "params") {
            m.params_path = resolve(one());
            have_params = true;
        } else if (k == "prewords") {
            for (const auto& v : vals) m.preword_paths.push_back(resolve(v));
        } else if (k == "checks") {
            for (const auto& v : vals) {
                if (v == "all") continue;
                if (!registry().count(v)) throw InputError(where + "unknown check '" + v + "'");
                m.checks.push_back(v);
            }
        } else if (k == "seed") {
            m.seed = parse_u64(one(), where);
        } else if (k == "cap-atoms") {
            m.cap_atoms = parse_u64(one(), where);
        } else if (k == "out") {
            m.out_dir = resolve(one());
        } else if (k == "jobs") {
            m.jobs = static_cast<unsigned>(std::max<std::uint64_t>(1, parse_u64(one(), where)));
        } else {
            throw InputError(where + "unknown key '" + k + "'");
        }
    }
    if (!have_params) throw InputError(source + ": no params entry");
    return m;
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open manifest " + path);
    return parse_manifest(f, path, fs::path(path).parent_path().string());
}

std::vector<std::string> check_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
}

bool CheckResult::pass() const {
    return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
}

bool RunReport::pass() const {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass(); });
}

RunInputs load_inputs(const RunManifest& m) {
    RunInputs in;
    in.params = load_params(m.params_path);
    for (const auto& p : m.preword_paths) in.prewords.push_back(load_prewords(p));
    if (static_cast<int>(in.prewords.size()) > in.params.top_stage())
        throw InputError("more preword files than parameter stages");
    in.seed = m.seed;
    in.cap_atoms = m.cap_atoms;
    return in;
}

std::vector<std::vector<std::vector<std::int64_t>>> as_strip_words(const std::vector<std::vector<Tuple>>& prewords) {
    StripWords out;
    for (const auto& stage : prewords) {
        auto& s = out.emplace_back();
        for (const auto& t : stage) s.emplace_back(t.begin(), t.end());
    }
    return out;
}

CheckResult run_check(const std::string& name, const RunInputs& in) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw InputError("unknown check '" + name + "'");
    CheckResult r;
    r.check = name;
    Context cx(in);
    Sink sink(r);
    it->second(cx, sink);
    return r;
}

RunReport run_checks(const RunInputs& in, const std::vector<std::string>& checks, unsigned jobs) {
    std::vector<std::string> names = checks.empty() ? check_names() : checks;
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    std::vector<CheckResult> results(names.size());
    std::vector<std::exception_ptr> errors(names.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < names.size();) {
            try {
                results[i] = run_check(names[i], in);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(names.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    // resource exhaustion wins over other errors so the exit status is stable
    for (auto& e : errors) {
        if (!e) continue;
        try {
            std::rethrow_exception(e);
        } catch (const ResourceError&) {
            throw;
        } catch (...) {
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    RunReport rep;
    rep.results = std::move(results);
    return rep;
}

void write_report(const RunReport& rep, const RunInputs& in, std::ostream& out) {
    auto join = [](const std::vector<std::int64_t>& v) {
        std::string s;
        for (auto x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
        return s;
    };
    out << "PARAMS k=" << join(in.params.k) << " l=" << join(in.params.l) << " s=" << join(in.params.s) << "\n";
    out << "SEED " << in.seed << "\n";
    std::size_t total = 0, failed = 0;
    for (const auto& r : rep.results) {
        for (const auto& l : r.lines) {
            ++total;
            if (!l.pass) ++failed;
            out << "CHECK " << l.name << ' ' << (l.pass ? "PASS" : "FAIL") << " value=" << l.value << " bound=" << l.bound;
            if (!l.pass) out << " violates=\"" << l.violates << '"';
            out << '\n';
        }
        for (const auto& nt : r.notes) out << "NOTE " << nt.name << ' ' << nt.text << '\n';
    }
    out << "RESULT " << (failed ? "FAIL" : "PASS") << " checks=" << total << " failed=" << failed << '\n';
}

void emit_words(const ConstructionSequence& cs, int stage, std::uint64_t from, std::uint64_t to, std::ostream& out,
                std::optional<std::size_t> which) {
    if (stage < 0 || stage > cs.top()) throw InputError("stage " + std::to_string(stage) + " not in the sequence");
    const auto& level = cs.levels[stage];
    if (which && *which >= level.size()) throw InputError("word index out of range");
    if (from > to) throw InputError("reversed range");
    if (from == to) return;
    for (std::size_t i = 0; i < level.size(); ++i) {
        if (which && i != *which) continue;
        const auto& w = *level[i];
        if (to > w.length()) throw InputError("range end " + std::to_string(to) + " beyond word length " + std::to_string(w.length()));
        for (std::uint64_t m = from; m < to; ++m) out << (m == from ? "" : " ") << token(w.at(m));
        out << '\n';
    }
}

} // namespace circlesys
