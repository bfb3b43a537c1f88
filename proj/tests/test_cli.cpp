#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "autodens/dfao.hpp"
#include "autodens/rational.hpp"
#include "corpus.hpp"

using nlohmann::json;
using namespace autodens;
using namespace testutil;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args, const std::string& redirect = " 2>&1",
                  const std::string& env_prefix = "") {
    std::string cmd = env_prefix + AUTODENS_CLI_PATH + " " + args + redirect;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json run_json(const std::string& args, int expect_code = 0) {
    CmdResult r = run_cli(args, " 2>/dev/null");
    CHECK(r.code == expect_code);
    return json::parse(r.out);
}

double mid(const json& loglin) {
    Rat lo = parse_rat(loglin["enclosure"][0].get<std::string>());
    Rat hi = parse_rat(loglin["enclosure"][1].get<std::string>());
    return rat_to_double((lo + hi) / 2);
}

}  // namespace

TEST_CASE("density report as json") {
    json j = run_json("density " + corpus_path("paperfolding.aut") + " --along primes");
    CHECK(j["along"] == "primes");
    CHECK(j["natural"]["exists"] == true);
    CHECK(j["table"]["0"] == "1/2");
    CHECK(j["table"]["1"] == "1/2");
    CHECK(j["log"]["1"]["exact"] == true);

    json ts = run_json("density " + corpus_path("threestate.aut") + " --along primes");
    CHECK(ts["natural"]["exists"] == false);
    CHECK(!ts["natural"].contains("table"));
    CHECK(ts["natural"]["witness"]["alpha"] == "b");
    CHECK(ts["natural"]["witness"]["value_a"] != ts["natural"]["witness"]["value_b"]);
    CHECK(mid(ts["log"]["b"]) == doctest::Approx(0.6309297536).epsilon(1e-6));
    CHECK(ts["log"]["b"]["exact"] == true);
    CHECK(ts["log"]["b"]["c0"] == "0");
    CHECK(ts["components"].size() == 2);
}

TEST_CASE("density report as text") {
    CmdResult r = run_cli("density " + corpus_path("paperfolding.aut") +
                          " --along primes --format text");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "natural densities exist"));
    CHECK(contains(r.out, "1 = 1/2"));

    CmdResult ts = run_cli("density " + corpus_path("threestate.aut") +
                           " --along primes --format text");
    CHECK(ts.code == 0);
    CHECK(contains(ts.out, "natural densities do not exist"));
    CHECK(contains(ts.out, "witness"));
}

TEST_CASE("info summarizes the automaton") {
    json j = run_json("info " + corpus_path("paperfolding.aut"));
    CHECK(j["base"] == 2);
    CHECK(j["states"] == 4);
    CHECK(j["minimal_states"] == 4);
    CHECK(j["prolongable"] == true);
    CHECK(j["rebase_exponent"] == 1);
    REQUIRE(j["final_components"].size() == 1);
    CHECK(j["final_components"][0]["primitive"] == true);
    CHECK(j["final_components"][0]["column_number"] == 1);

    CmdResult text = run_cli("info " + corpus_path("fivestate.aut") + " --format text");
    CHECK(text.code == 0);
    CHECK(contains(text.out, "contraction exponent 2"));
}

TEST_CASE("decompose writes loadable sidecar automata") {
    namespace fs = std::filesystem;
    fs::path tmp = fs::temp_directory_path() / "autodens_cli_threestate.aut";
    fs::copy_file(corpus_path("threestate.aut"), tmp, fs::copy_options::overwrite_existing);
    for (const char* suffix : {".b1", ".m1", ".b2", ".m2", ".m0"})
        fs::remove(fs::path(tmp.string() + suffix));

    json j = run_json("decompose " + tmp.string());
    CHECK(j["base"] == 3);
    CHECK(j["rebase_exponent"] == 1);
    REQUIRE(j["components"].size() == 2);
    std::set<std::string> anchors, previews;
    for (const auto& c : j["components"]) {
        CHECK(c["generators_finite"] == true);
        CHECK(c["zero_in_set"] == false);
        anchors.insert(c["anchor"].get<std::string>());
        previews.insert(c["generator_preview"].dump());
    }
    CHECK(anchors == std::set<std::string>{"b", "c"});
    CHECK(previews == std::set<std::string>{"[1]", "[2]"});

    for (const char* suffix : {".b1", ".m1", ".b2", ".m2", ".m0"}) {
        fs::path side(tmp.string() + suffix);
        REQUIRE(fs::exists(side));
        Dfao a = load_dfao(side.string());
        CHECK(a.base == 3);
    }
    // The written components reproduce the decomposition identity at n = 0..500:
    Dfao b1 = load_dfao(tmp.string() + ".b1");
    Dfao m1 = load_dfao(tmp.string() + ".m1");
    Dfao b2 = load_dfao(tmp.string() + ".b2");
    Dfao m2 = load_dfao(tmp.string() + ".m2");
    Dfao orig = corpus("threestate.aut");
    for (unsigned long long n = 0; n < 500; ++n) {
        if (evaluate(m1, n) == "1") CHECK(evaluate(b1, n) == evaluate(orig, n));
        if (evaluate(m2, n) == "1") CHECK(evaluate(b2, n) == evaluate(orig, n));
    }
}

TEST_CASE("extremal certificates as json") {
    json j = run_json("extremal " + corpus_path("threestate.aut") +
                      " --along primes --alpha b");
    CHECK(j["alpha"] == "b");
    CHECK(j["upper"] == "3/4");
    CHECK(j["lower"] == "1/2");
    const json& up = j["certificate"]["upper"];
    CHECK(up["theta"] == "3/4");
    CHECK(up["N"] == "1/2");
    CHECK(up["D"] == "2/3");
    CHECK(up["preperiod"] == json::array({1}));
    CHECK(up["period"] == json::array({2}));
    CHECK(up["inner_optimum_zero"] == true);
    const json& lo = j["certificate"]["lower"];
    CHECK(lo["N"] == "1/2");
    CHECK(lo["D"] == "1");

    CmdResult text = run_cli("extremal " + corpus_path("threestate.aut") +
                             " --along primes --alpha b --format text");
    CHECK(text.code == 0);
    CHECK(contains(text.out, "upper density of b along primes = 3/4"));
    CHECK(contains(text.out, "lower density = 1/2"));
}

TEST_CASE("verify compares exact and empirical values") {
    json ok = run_json("verify " + corpus_path("paperfolding.aut") +
                       " --along primes --limit 20000 --tol 0.02");
    CHECK(ok["pass"] == true);
    CHECK(ok["terms"] == 20000);
    REQUIRE(ok["lines"].size() == 2);
    for (const auto& line : ok["lines"]) CHECK(line["pass"] == true);

    // An odd term count cannot hit the exact value 1/2, so this must fail.
    json bad = run_json("verify " + corpus_path("paperfolding.aut") +
                        " --along primes --limit 1001 --tol 0.0000000001",
                        1);
    CHECK(bad["pass"] == false);

    CmdResult text = run_cli("verify " + corpus_path("thuemorse.aut") +
                             " --along squares --limit 20000 --tol 0.05 --format text");
    CHECK(text.code == 0);
    CHECK(contains(text.out, "verdict: PASS"));
}

TEST_CASE("error channels and exit codes") {
    // Unreadable input file.
    CmdResult miss = run_cli("info /nonexistent/never.aut");
    CHECK(miss.code == 2);
    CHECK(contains(miss.out, "input error:"));
    CHECK(contains(miss.out, "cannot open automaton file"));

    // Malformed automaton file.
    namespace fs = std::filesystem;
    fs::path bad = fs::temp_directory_path() / "autodens_cli_bad.aut";
    std::ofstream(bad) << "bogus line\n";
    CmdResult mal = run_cli("info " + bad.string());
    CHECK(mal.code == 2);
    CHECK(contains(mal.out, "input error:"));

    // Unknown subsequence.
    CmdResult along = run_cli("density " + corpus_path("paperfolding.aut") +
                              " --along evens");
    CHECK(along.code == 2);
    CHECK(contains(along.out, "input error:"));

    // Domain restrictions map to exit 1.
    CmdResult sq = run_cli("density " + corpus_path("parity6.aut") + " --along squares");
    CHECK(sq.code == 1);
    CHECK(contains(sq.out, "domain error:"));
    CHECK(contains(sq.out, "squares unsupported for base 6"));

    // Missing required option.
    CmdResult noalpha = run_cli("extremal " + corpus_path("threestate.aut") +
                                " --along primes");
    CHECK(noalpha.code == 2);
    CHECK(contains(noalpha.out, "--alpha"));

    // Missing subcommand / unknown flag go through the argument parser.
    CmdResult nosub = run_cli("");
    CHECK(nosub.code == 2);
    CmdResult badflag = run_cli("density " + corpus_path("paperfolding.aut") +
                                " --frobnicate");
    CHECK(badflag.code == 2);

    // An exhausted state budget is reported as a domain error.
    CmdResult budget = run_cli("density " + corpus_path("paperfolding.aut") +
                               " --along primes", " 2>&1",
                               "AUTODENS_STATE_BUDGET=2 ");
    CHECK(budget.code == 1);
    CHECK(contains(budget.out, "domain error:"));
}
