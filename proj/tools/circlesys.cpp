#include "CLI11.hpp"

#include "circlesys/consys.hpp"
#include "circlesys/errors.hpp"
#include "circlesys/factor.hpp"
#include "circlesys/names.hpp"
#include "circlesys/procsim.hpp"
#include "circlesys/runner.hpp"
#include "circlesys/smoothreal.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace circlesys;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string params, manifest, out;
    std::vector<std::string> prewords;
    std::uint64_t seed = 1;
    std::uint64_t cap = kDefaultAtomCap;
    unsigned jobs = 1;
    bool seed_set = false, cap_set = false;
};

RunManifest manifest_from(const Globals& g) {
    RunManifest m;
    if (!g.manifest.empty()) m = load_manifest(g.manifest);
    if (!g.params.empty()) m.params_path = g.params;
    if (!g.prewords.empty()) m.preword_paths = g.prewords;
    if (m.params_path.empty()) throw InputError("no parameter file: give --params or --manifest");
    if (g.seed_set) m.seed = g.seed;
    if (g.cap_set) m.cap_atoms = g.cap;
    if (!g.out.empty()) m.out_dir = g.out;
    if (g.jobs > 1) m.jobs = g.jobs;
    return m;
}

// report to stdout and, with an output directory, to <out>/<file>
int finish(const RunReport& rep, const RunInputs& in, const std::string& out_dir, const std::string& file) {
    std::ostringstream text;
    write_report(rep, in, text);
    std::cout << text.str();
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream f(fs::path(out_dir) / file, std::ios::binary);
        if (!f) throw InputError("cannot write report under " + out_dir);
        f << text.str();
    }
    return rep.pass() ? 0 : 1;
}

int run_named(const Globals& g, const std::vector<std::string>& checks, const std::string& file) {
    const RunManifest m = manifest_from(g);
    const RunInputs in = load_inputs(m);
    std::vector<std::string> wanted = m.checks.empty() ? checks : m.checks;
    if (!checks.empty() && !m.checks.empty()) {
        // a subcommand restricts the manifest to its own checks
        std::vector<std::string> keep;
        for (const auto& c : checks)
            if (std::find(m.checks.begin(), m.checks.end(), c) != m.checks.end()) keep.push_back(c);
        wanted = keep.empty() ? checks : keep;
    }
    return finish(run_checks(in, wanted, m.jobs), in, m.out_dir, file);
}

void print_params(const Params& P) {
    for (int n = 0; n <= P.top_stage(); ++n) {
        std::cout << "stage " << n;
        if (n < P.top_stage()) std::cout << " k=" << P.k[n] << " l=" << P.l[n];
        std::cout << " s=" << P.s[n] << " p=" << to_string(P.p[n]) << " q=" << to_string(P.q[n])
                  << " alpha=" << to_string(P.alpha[n]) << "\n";
    }
}

std::pair<std::uint64_t, std::uint64_t> parse_grid(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos) throw InputError("grid must look like MxN, got '" + s + "'");
    try {
        const auto m = std::stoull(s.substr(0, x)), n = std::stoull(s.substr(x + 1));
        if (m == 0 || n == 0) throw InputError("empty grid");
        return {m, n};
    } catch (const std::logic_error&) {
        throw InputError("grid must look like MxN, got '" + s + "'");
    }
}

int smooth_command(const std::string& mode, const std::string& grid, double eps, std::uint64_t seed,
                   std::uint64_t samples, const Globals& g) {
    const auto [m, n] = parse_grid(grid);
    std::vector<std::uint64_t> sigma(m * n);
    for (std::uint64_t i = 0; i < m * n; ++i) sigma[i] = i;
    ObedienceReport rep;
    if (mode == "swap") {
        if (m * n < 2) throw InputError("a swap needs two cells");
        SwapSpec spec;
        spec.m = m;
        spec.n = n;
        spec.delta = eps;
        std::swap(sigma[0], sigma[1]);
        rep = measure_obedience(approx_swap(spec), sigma, m, n, Rect{}, samples, seed);
    } else if (mode == "realize") {
        std::mt19937_64 rng(seed);
        std::shuffle(sigma.begin(), sigma.end(), rng);
        try {
            rep = realize_perm(sigma, m, n, eps, samples, seed + 1).report;
        } catch (const ToleranceError& e) {
            std::cout << "CHECK smooth.realize FAIL value=tolerance:" << e.achieved << " bound=" << eps
                      << " violates=\"the realized map obeys the permutation off eps\"\n";
            return 1;
        }
    } else if (mode == "stage") {
        const RunManifest mf = manifest_from(g);
        const RunInputs in = load_inputs(mf);
        if (in.prewords.empty()) throw InputError("stage maps need preword files");
        SmoothConfig cfg;
        cfg.seed = seed;
        cfg.eps = eps / static_cast<double>(in.params.q64(1) + 1);
        const auto words = as_strip_words(in.prewords);
        const auto s1 = stage_map(in.params, words, 1, cfg);
        const auto proc = simulate(in.params, {words[0]}, in.cap_atoms);
        const auto tm = trajectory_match(s1, proc, samples, seed);
        const bool ok = tm.match_fraction >= 1 - eps;
        std::printf("CHECK smooth.stage1 %s value=%.6f bound=%.6f%s\n", ok ? "PASS" : "FAIL", tm.match_fraction, 1 - eps,
                    ok ? "" : " violates=\"smooth orbits visit the cells of the simulated tower\"");
        return ok ? 0 : 1;
    } else {
        throw InputError("smooth mode must be swap, realize or stage");
    }
    std::printf("# cell  target  samples  obedient\n");
    for (std::uint64_t c = 0; c < m * n; ++c)
        std::printf("%6llu  %6llu  %7llu  %.6f\n", static_cast<unsigned long long>(c), static_cast<unsigned long long>(sigma[c]),
                    static_cast<unsigned long long>(rep.samples_per_cell[c]), rep.per_cell[c]);
    const bool ok = rep.fraction >= 1 - eps;
    std::printf("CHECK smooth.%s %s value=%.6f bound=%.6f%s\n", mode.c_str(), ok ? "PASS" : "FAIL", rep.fraction, 1 - eps,
                ok ? "" : " violates=\"the map obeys the permutation off eps\"");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"circlesys: finite-stage checks for circular construction sequences"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--params", g.params, "parameter file (k/l/s lines)");
    app.add_option("--manifest", g.manifest, "run manifest");
    app.add_option("--prewords", g.prewords, "preword files, one per stage");
    app.add_option("--seed", g.seed, "seed for sampled checks")->each([&](const std::string&) { g.seed_set = true; });
    app.add_option("--cap-atoms", g.cap, "largest process grid")->each([&](const std::string&) { g.cap_set = true; });
    app.add_option("--out", g.out, "output directory");
    app.add_option("--jobs", g.jobs, "worker threads for run");

    auto* params = app.add_subcommand("params", "derived rotation numbers and their checks");
    auto* words = app.add_subcommand("words", "emit words of one stage");
    int w_stage = 1;
    std::uint64_t w_from = 0;
    std::optional<std::uint64_t> w_to;
    std::optional<std::size_t> w_which;
    words->add_option("--stage", w_stage, "stage")->required();
    words->add_option("--from", w_from, "first position");
    words->add_option("--to", w_to, "end position (exclusive; default: whole word)");
    words->add_option("--word", w_which, "only this word of the level");
    auto* seq = app.add_subcommand("seq", "construction sequence checks");
    auto* proc = app.add_subcommand("proc", "process simulation: towers and checks");
    int p_stage = -1;
    proc->add_option("--stage", p_stage, "dump the towers of this stage");
    auto* names = app.add_subcommand("names", "tower names and their checks");
    auto* factor = app.add_subcommand("factor", "rotation factor of a symbolic point");
    std::string point;
    factor->add_option("--point", point, "offsets like -,1,9")->required();
    auto* smooth = app.add_subcommand("smooth", "smooth realization of permutations");
    std::string mode, grid = "2x1";
    double eps = 0.05;
    std::uint64_t samples = 10000, sseed = 1;
    smooth->add_option("mode", mode, "swap | realize | stage")->required();
    smooth->add_option("--grid", grid, "MxN");
    smooth->add_option("--eps", eps, "tolerance");
    smooth->add_option("--samples", samples, "Monte Carlo samples");
    auto* run = app.add_subcommand("run", "run a manifest (or every check on --params/--prewords)");
    for (auto* sub : {params, words, seq, proc, names, factor, smooth, run}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*params) {
            const RunManifest m = manifest_from(g);
            const RunInputs in = load_inputs(m);
            print_params(in.params);
            return finish(run_checks(in, {"numerology", "recursion"}, m.jobs), in, m.out_dir, "params.txt");
        }
        if (*words) {
            const RunManifest m = manifest_from(g);
            const RunInputs in = load_inputs(m);
            BuildOptions opt;
            const auto cs = build_sequence(in.params.s.at(0), in.params, in.prewords, opt);
            if (w_stage < 0 || w_stage > cs.top()) throw InputError("stage " + std::to_string(w_stage) + " not built");
            const std::uint64_t to = w_to ? *w_to : cs.levels[w_stage].front()->length();
            if (m.out_dir.empty()) {
                emit_words(cs, w_stage, w_from, to, std::cout, w_which);
            } else {
                fs::create_directories(m.out_dir);
                std::ofstream f(fs::path(m.out_dir) / ("words_stage" + std::to_string(w_stage) + ".txt"), std::ios::binary);
                emit_words(cs, w_stage, w_from, to, f, w_which);
            }
            return 0;
        }
        if (*seq) return run_named(g, {"boundary", "length", "readability", "uniformity"}, "seq.txt");
        if (*proc) {
            if (p_stage >= 0) {
                const RunInputs in = load_inputs(manifest_from(g));
                const auto gp = simulate(in.params, as_strip_words(in.prewords), in.cap_atoms);
                if (p_stage > gp.stage()) throw InputError("stage beyond the supplied word data");
                dump_towers(gp, p_stage, std::cout);
            }
            return run_named(g, {"eps", "process", "requirements"}, "proc.txt");
        }
        if (*names) {
            const RunInputs in = load_inputs(manifest_from(g));
            const auto gp = simulate(in.params, as_strip_words(in.prewords), in.cap_atoms);
            for (int m = 1; m <= gp.stage(); ++m)
                for (std::uint64_t s = 0; s < gp.tower_count(m); ++s) {
                    const Word w = simulate_tower_name(gp, m, s);
                    std::cout << "name stage " << m << " tower " << s << ": "
                              << (w.size() <= 64 ? to_text(w) : to_text(Word(w.begin(), w.begin() + 64)) + " ...") << "\n";
                }
            return run_named(g, {"distinct", "names", "stability"}, "names.txt");
        }
        if (*factor) {
            const RunInputs in = load_inputs(manifest_from(g));
            const auto pt = parse_point(point);
            const auto tr = rho_trace(in.params, pt);
            for (int n = 1; n <= pt.top(); ++n) std::cout << "rho " << n << " = " << to_string(tr.rho[n]) << "\n";
            std::cout << "limit " << to_string(tr.limit) << " error<=" << to_string(tr.error_bound)
                      << " monotone=" << tr.monotone << " cauchy=" << tr.cauchy << "\n";
            const auto sh = shift_point(in.params, pt);
            if (sh.point)
                std::cout << "shift " << to_string(*sh.point) << "\n";
            else
                std::cout << "shift crosses a boundary at stage " << sh.crossing->stage << "\n";
            return 0;
        }
        if (*smooth) return smooth_command(mode, grid, eps, g.seed_set ? g.seed : sseed, samples, g);
        if (*run) return run_named(g, {}, "report.txt");
    } catch (const ResourceError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ConstraintError& e) {
        std::cerr << "constraint error: " << e.what() << "\n";
        return 2;
    } catch (const CoherenceError& e) {
        std::cerr << "incoherent point: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
