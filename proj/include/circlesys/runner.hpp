#pragma once

#include "circlesys/consys.hpp"
#include "circlesys/procsim.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace circlesys {

struct RunManifest {
    std::string params_path;
    std::vector<std::string> preword_paths; // one file per stage, P_1 first
    std::vector<std::string> checks;        // empty means every registered check
    std::uint64_t seed = 1;
    std::uint64_t cap_atoms = kDefaultAtomCap;
    std::string out_dir;
    unsigned jobs = 1;
};

// key = value lines, '#' comments; relative paths are taken from `base_dir`.
RunManifest parse_manifest(std::istream& in, const std::string& source, const std::string& base_dir);
RunManifest load_manifest(const std::string& path);

// Sorted names of the checks `run` knows about.
std::vector<std::string> check_names();

struct CheckLine {
    std::string name;
    bool pass = true;
    std::string value, bound;
    std::string violates; // property description, FAIL lines only
};
struct NoteLine {
    std::string name, text;
};
struct CheckResult {
    std::string check;
    std::vector<CheckLine> lines;
    std::vector<NoteLine> notes;
    bool pass() const;
};

struct RunInputs {
    Params params;
    std::vector<std::vector<Tuple>> prewords;
    std::uint64_t seed = 1;
    std::uint64_t cap_atoms = kDefaultAtomCap;
};
// Reads the files named by the manifest. InputError/ConstraintError on bad input.
RunInputs load_inputs(const RunManifest& m);

// Runs one check; throws InputError for an unknown name, lets ResourceError through.
CheckResult run_check(const std::string& name, const RunInputs& in);

struct RunReport {
    std::vector<CheckResult> results; // ordered by check name
    bool pass() const;
};
// Checks run on `jobs` worker threads; a ResourceError from any check is rethrown after all finish.
RunReport run_checks(const RunInputs& in, const std::vector<std::string>& checks, unsigned jobs);

// The line-oriented report: `CHECK <name> PASS|FAIL value=<v> bound=<b>`.
void write_report(const RunReport& rep, const RunInputs& in, std::ostream& out);

// Tokens [from, to) of every word of level `stage` (or just word `which`), one line per word.
// Nothing is written for an empty range.
void emit_words(const ConstructionSequence& cs, int stage, std::uint64_t from, std::uint64_t to, std::ostream& out,
                std::optional<std::size_t> which = std::nullopt);

// int64 strip sequences for the process side.
std::vector<std::vector<std::vector<std::int64_t>>> as_strip_words(const std::vector<std::vector<Tuple>>& prewords);

} // namespace circlesys
