#include "doctest.h"

#include "circlesys/errors.hpp"
#include "circlesys/runner.hpp"

#include <sstream>

using namespace circlesys;

namespace {

RunManifest parse(const std::string& text) {
    std::istringstream in(text);
    return parse_manifest(in, "m.txt", "/data");
}

RunInputs desk_inputs() {
    RunInputs in;
    in.params = derive_params({2, 2}, {4, 4}, {2, 2, 2});
    in.prewords = {{{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}};
    return in;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("manifest parsing") {
    auto m = parse("# comment\nparams = p.params\nprewords = a b   # two stages\nchecks = recursion names\nseed = 9\n"
                   "cap-atoms = 100\njobs = 3\n");
    CHECK(m.params_path == "/data/p.params");
    CHECK(m.preword_paths == std::vector<std::string>{"/data/a", "/data/b"});
    CHECK(m.checks == std::vector<std::string>{"recursion", "names"});
    CHECK(m.seed == 9);
    CHECK(m.cap_atoms == 100);
    CHECK(m.jobs == 3);
    CHECK(parse("params = /abs/p\nchecks = all\n").params_path == "/abs/p");
    CHECK(parse("params = p\nchecks = all\n").checks.empty());

    CHECK_THROWS_AS(parse("params = p\nbogus = 1\n"), InputError);
    CHECK_THROWS_AS(parse("params = p\nchecks = nonsense\n"), InputError);
    CHECK_THROWS_AS(parse("params = p\nseed = -1\n"), InputError);
    CHECK_THROWS_AS(parse("params p\n"), InputError);
    try {
        parse("params = p\n\nseed = x\n");
        FAIL("no throw");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("m.txt:3:") != std::string::npos);
    }
}

TEST_CASE("check registry") {
    const auto names = check_names();
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(names.size() == 16);
    CHECK_THROWS_AS(run_check("nonsense", desk_inputs()), InputError);
}

TEST_CASE("emit_words") {
    const auto in = desk_inputs();
    const auto cs = build_sequence(2, in.params, in.prewords);
    std::ostringstream full;
    emit_words(cs, 1, 0, 8, full);
    CHECK(full.str() == "b 0 0 0 b 1 1 1\nb 1 1 1 b 0 0 0\n");

    std::ostringstream one;
    emit_words(cs, 2, 510, 512, one, 1);
    CHECK(lines_of(one.str()).size() == 1);
    const Word& w = cs.word(2, 1);
    CHECK(one.str() == token(w[510]) + " " + token(w[511]) + "\n");
    CHECK(one.str() == "e e\n");

    std::ostringstream empty;
    emit_words(cs, 1, 3, 3, empty);
    CHECK(empty.str().empty());

    std::ostringstream sink;
    CHECK_THROWS_AS(emit_words(cs, 1, 4, 2, sink), InputError);
    CHECK_THROWS_AS(emit_words(cs, 1, 0, 9, sink), InputError);
    CHECK_THROWS_AS(emit_words(cs, 1, 0, 8, sink, 5), InputError);
}

TEST_CASE("emit_words reads a lazy stage without materializing it") {
    RunInputs in = desk_inputs();
    in.params = extend_params(in.params, 2, 4, 2);
    in.prewords.push_back({{0, 1}, {1, 0}});
    const auto cs = build_sequence(2, in.params, in.prewords);
    REQUIRE(!cs.materialized(3));
    std::ostringstream out;
    emit_words(cs, 3, 0, 100, out, 0);
    std::istringstream toks(out.str());
    int n = 0;
    for (std::string t; toks >> t;) ++n;
    CHECK(n == 100);
    CHECK(out.str().rfind("b ", 0) == 0);
}

TEST_CASE("desk run passes and its report is deterministic") {
    const auto in = desk_inputs();
    const auto names = check_names();
    const auto a = run_checks(in, names, 1), b = run_checks(in, names, 4);
    std::ostringstream ra, rb;
    write_report(a, in, ra);
    write_report(b, in, rb);
    CHECK(a.pass());
    CHECK(ra.str() == rb.str());
    const auto lines = lines_of(ra.str());
    REQUIRE(!lines.empty());
    CHECK(lines.front() == "PARAMS k=2 2 l=4 4 s=2 2 2");
    CHECK(lines.back().rfind("RESULT PASS checks=", 0) == 0);
}

TEST_CASE("failures are reported with the violated property") {
    RunInputs in = desk_inputs();
    in.params = derive_params({2, 2}, {4, 4}, {2, 2, 4});
    in.prewords[1] = {{0, 1}, {1, 0}, {0, 1}, {1, 0}};
    const auto rep = run_checks(in, {"requirements"}, 1);
    CHECK(!rep.pass());
    std::ostringstream out;
    write_report(rep, in, out);
    CHECK(out.str().find("CHECK requirements.stage2.distinct FAIL value=words 0,2 bound=PASS violates=\"") !=
          std::string::npos);
    CHECK(out.str().find("RESULT FAIL checks=") != std::string::npos);
}

TEST_CASE("the atom cap surfaces as ResourceError") {
    RunInputs in = desk_inputs();
    in.cap_atoms = 64;
    CHECK_THROWS_AS(run_checks(in, {"process"}, 2), ResourceError);
}
