// End-to-end tests driving the installed binary through a shell: documented
// exit codes, stdout summaries, certificate contents, and the byte-level
// reproducibility of certificates from their own embedded instances.

#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#ifndef FAMEXT_BIN
#error "FAMEXT_BIN must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(FAMEXT_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {};
    std::string out;
    char buf[512];
    while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("famext_cli_" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& contents) {
    const fs::path path = work_dir() / name;
    std::ofstream out(path);
    out << contents;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// All elements of the algebra with the given blocks, keyed as sorted atom
// lists, valued by the callback.
json table_values(const std::vector<std::vector<int>>& blocks,
                  const std::function<std::string(const std::set<int>&)>& value_of) {
    json vals = json::object();
    const std::size_t k = blocks.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::set<int> atoms;
        for (std::size_t j = 0; j < k; ++j)
            if (mask >> j & 1) atoms.insert(blocks[j].begin(), blocks[j].end());
        std::string key;
        for (int a : atoms) key += (key.empty() ? "" : ",") + std::to_string(a);
        vals[key] = value_of(atoms);
    }
    return vals;
}

json zero_values(const std::vector<std::vector<int>>& blocks) {
    return table_values(blocks, [](const std::set<int>&) { return "0"; });
}

// Extracts the embedded instance from a certificate, re-runs the recorded
// command on it, and reports whether the new certificate is byte-identical.
bool reproduces(const std::string& cert_path, const std::string& tag) {
    const json cert = json::parse(slurp(cert_path));
    const std::string inst_path = write_file("rt_" + tag + ".json", cert["instance"].dump());
    std::string args;
    for (const json& a : cert["args"]) args += " " + a.get<std::string>();
    const std::string cert2 = (work_dir() / ("rt_" + tag + "_cert.json")).string();
    run_cli(cert["command"].get<std::string>() + " " + inst_path + " --args" + args + " --out " +
            cert2);
    return slurp(cert_path) == slurp(cert2);
}

std::string cylinder_pair_instance() {
    return write_file("cyl2.json", R"({
      "universe": 4,
      "algebras": {
        "B0": {"cylinder": {"dimension": 2, "coords": [0]}},
        "B1": {"cylinder": {"dimension": 2, "coords": [1]}}
      },
      "measures": {
        "nu1": {"algebra": "B0", "values": ["1/2", "1/2"]},
        "nu2": {"algebra": "B1", "values": ["1", "0"]}
      }
    })");
}

}  // namespace

TEST_CASE("cli: sc on the two-coordinate cylinder pair prints value 1 and a chain") {
    const std::string inst = cylinder_pair_instance();
    const std::string cert = (work_dir() / "sc_cert.json").string();
    const RunResult res = run_cli("sc " + inst + " --args nu1 nu2 --out " + cert);
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("sc = 1\n") != std::string::npos);
    CHECK(res.out.find("chain:") != std::string::npos);
    const json parsed = json::parse(slurp(cert));
    CHECK(parsed["result"]["value"] == "1");
    CHECK(parsed["result"]["chain"].size() >= 2);
    CHECK(reproduces(cert, "sc"));
}

TEST_CASE("cli: extend-min returns a norm-1 extension of the cylinder pair") {
    const std::string inst = cylinder_pair_instance();
    const std::string cert = (work_dir() / "ext_cert.json").string();
    const RunResult res = run_cli("extend-min " + inst + " --args nu1 nu2 --out " + cert);
    CHECK(res.exit_code == 0);
    const json parsed = json::parse(slurp(cert));
    CHECK(parsed["result"]["norm"] == "1");
    CHECK(parsed["result"]["extension"]["blocks"].size() == 4);
    CHECK(reproduces(cert, "ext"));
}

TEST_CASE("cli: transport with unequal totals exits with the precondition code") {
    const std::string inst = write_file("tp.json", R"({
      "universe": 2,
      "algebras": {"D": {"blocks": [[0], [1]]}},
      "measures": {
        "a": {"algebra": "D", "values": ["1", "-1"]},
        "b": {"algebra": "D", "values": ["1", "0"]}
      }
    })");
    CHECK(run_cli("transport " + inst + " --args a b").exit_code == 3);
}

TEST_CASE("cli: transport emits the matrix and its absolute total") {
    const std::string inst = write_file("tp_ok.json", R"({
      "universe": 2,
      "algebras": {"D": {"blocks": [[0], [1]]}},
      "measures": {
        "a": {"algebra": "D", "values": ["1", "-1"]},
        "b": {"algebra": "D", "values": ["1/2", "-1/2"]}
      }
    })");
    const std::string cert = (work_dir() / "tp_cert.json").string();
    const RunResult res = run_cli("transport " + inst + " --args a b --out " + cert);
    CHECK(res.exit_code == 0);
    const json parsed = json::parse(slurp(cert));
    CHECK(parsed["result"]["matrix"].size() == 2);
    CHECK(parsed["result"]["abs_total"] == "2");
    CHECK(reproduces(cert, "tp"));
}

TEST_CASE("cli: malformed input, bad names and missing parameters exit 2") {
    const std::string bad = write_file("bad.json", "{not json");
    CHECK(run_cli("sc " + bad + " --args a b").exit_code == 2);

    const std::string inst = cylinder_pair_instance();
    CHECK(run_cli("sc " + inst + " --args nu1 missing").exit_code == 2);
    CHECK(run_cli("sc " + inst + " --args nu1").exit_code == 2);
    CHECK(run_cli("sc /nonexistent/path.json --args a b").exit_code == 2);
    // lep-check without r anywhere.
    const std::string pair = write_file("pair.json", R"({
      "universe": 2,
      "algebras": {"T": {"blocks": [[0, 1]]}, "D": {"blocks": [[0], [1]]}}
    })");
    CHECK(run_cli("lep-check " + pair + " --args T D").exit_code == 2);
    // Unknown flag is a command-line parse failure.
    CHECK(run_cli("sc " + inst + " --args nu1 nu2 --no-such-flag").exit_code == 2);
}

TEST_CASE("cli: best-approximation distance of the pinned table is 1/2") {
    json inst;
    inst["universe"] = 2;
    inst["algebras"]["D"]["blocks"] = json::parse("[[0],[1]]");
    inst["tables"]["ones"]["algebra"] = "D";
    inst["tables"]["ones"]["values"] =
        table_values({{0}, {1}}, [](const std::set<int>& s) { return s.empty() ? "0" : "1"; });
    const std::string path = write_file("on.json", inst.dump());
    const std::string cert = (work_dir() / "on_cert.json").string();
    const RunResult res = run_cli("o-n " + path + " --args D ones --out " + cert);
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("o = 1/2\n") != std::string::npos);
    CHECK(json::parse(slurp(cert))["result"]["value"] == "1/2");
    CHECK(reproduces(cert, "on"));
}

TEST_CASE("cli: exact bound on the one-block algebra is the index term") {
    json inst;
    inst["universe"] = 1;
    inst["algebras"]["T"]["blocks"] = json::parse("[[0]]");
    inst["sequences"]["S"]["entries"] =
        json::array({json{{"index", 7}, {"table", json{{"algebra", "T"},
                                                       {"values", zero_values({{0}})}}}}});
    const std::string path = write_file("triv.json", inst.dump());
    const std::string cert = (work_dir() / "triv_cert.json").string();
    const RunResult res =
        run_cli("exact-o " + path + " --args T S --r 2 --n-max 7 --out " + cert);
    CHECK(res.exit_code == 0);
    const json parsed = json::parse(slurp(cert));
    CHECK(parsed["result"]["bound"]["kind"] == "exact");
    CHECK(parsed["result"]["bound"]["value"] == "1/8");
    CHECK(reproduces(cert, "triv"));
}

TEST_CASE("cli: exact bound goes infinite when the target rides a nested pair") {
    // phi restricts to the measures (0,-1) on {{0},{1,2,3}} and (-1,0) on
    // {{0,1},{2,3}}; that pair is admissible at every positive coarsening
    // bound and its chain functional is 3 > 2, so no extension fits the cap.
    json inst;
    inst["universe"] = 4;
    inst["algebras"]["D4"]["blocks"] = json::parse("[[0],[1],[2],[3]]");
    inst["sequences"]["S"]["entries"] = json::array(
        {json{{"index", 0},
              {"table",
               json{{"algebra", "D4"},
                    {"values", table_values({{0}, {1}, {2}, {3}}, [](const std::set<int>& s) {
                         const bool hit = s == std::set<int>{0, 1} || s == std::set<int>{1, 2, 3} ||
                                          s == std::set<int>{0, 1, 2, 3};
                         return hit ? "-1" : "0";
                     })}}}}});
    inst["params"]["r"] = "2";
    inst["params"]["n_max"] = 0;
    const std::string path = write_file("inf.json", inst.dump());
    const std::string cert = (work_dir() / "inf_cert.json").string();
    const RunResult res = run_cli("exact-o " + path + " --args D4 S --out " + cert);
    CHECK(res.exit_code == 5);
    const json parsed = json::parse(slurp(cert));
    CHECK(parsed["result"]["bound"]["kind"] == "infinite");
    CHECK(reproduces(cert, "inf"));
}

TEST_CASE("cli: certified upper bound at the pinned grid step") {
    json inst;
    inst["universe"] = 2;
    inst["algebras"]["D"]["blocks"] = json::parse("[[0],[1]]");
    inst["sequences"]["Z"]["entries"] =
        json::array({json{{"index", 20}, {"table", json{{"algebra", "D"},
                                                        {"values", zero_values({{0}, {1}})}}}}});
    const std::string path = write_file("upper.json", inst.dump());
    const std::string cert = (work_dir() / "upper_cert.json").string();
    const RunResult res =
        run_cli("upper-o " + path + " --args D Z --r 2 --epsilon 1/2 --n-max 20 --out " + cert);
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("certified") != std::string::npos);
    const json parsed = json::parse(slurp(cert));
    CHECK(parsed["result"]["delta"] == "1/20");
    CHECK(parsed["result"]["certified"] == true);
    CHECK(parsed["result"]["bound"] == "1/2");
    CHECK(reproduces(cert, "upper"));
}

TEST_CASE("cli: pair extension check reports the nested witness") {
    const std::string inst = write_file("lep.json", R"({
      "universe": 4,
      "algebras": {"B1": {"blocks": [[0], [1, 2, 3]]}, "B2": {"blocks": [[0, 1], [2, 3]]}}
    })");
    const std::string cert = (work_dir() / "lep_cert.json").string();
    const RunResult res = run_cli("lep-check " + inst + " --args B1 B2 --r 2 --out " + cert);
    CHECK(res.exit_code == 0);
    const json parsed = json::parse(slurp(cert));
    CHECK(parsed["result"]["ok"] == false);
    CHECK(parsed["result"]["max_sc"] == "3");
    CHECK(parsed["result"].contains("witness"));
    CHECK(reproduces(cert, "lep"));
}

TEST_CASE("cli: cascade run emits the pinned report shape") {
    json inst;
    inst["universe"] = 4;
    inst["algebras"]["B0"]["cylinder"] = json{{"dimension", 2}, {"coords", json::array({0})}};
    inst["algebras"]["B1"]["cylinder"] = json{{"dimension", 2}, {"coords", json::array({1})}};
    inst["algebras"]["D4"]["blocks"] = json::parse("[[0],[1],[2],[3]]");
    json entries = json::array();
    for (int i = 1; i <= 3; ++i)
        entries.push_back(json{{"index", i},
                               {"table", json{{"algebra", "D4"},
                                              {"values", zero_values({{0}, {1}, {2}, {3}})}}}});
    inst["sequences"]["Z"]["entries"] = std::move(entries);
    inst["params"] = json{{"r", "2"}, {"n_max", 3}, {"tracked", json::parse("[[0,1]]")}};
    const std::string path = write_file("run.json", inst.dump());
    const std::string cert = (work_dir() / "run_cert.json").string();
    const RunResult res = run_cli("approx-run " + path + " --args Z B0 B1 --out " + cert);
    CHECK(res.exit_code == 0);
    const json parsed = json::parse(slurp(cert));
    const json& result = parsed["result"];
    // Exactly the documented report keys.
    std::set<std::string> keys;
    for (const auto& item : result.items()) keys.insert(item.key());
    CHECK(keys == std::set<std::string>{"r", "measures", "deviations", "o_bound_trail",
                                        "claim_a_checks"});
    CHECK(result["r"] == "2");
    CHECK(result["measures"].size() == 3);
    CHECK(result["claim_a_checks"] == 3);
    CHECK(result["deviations"]["0,1"] == json::parse(R"(["0","0","0"])"));
    CHECK(result["o_bound_trail"].size() == 3);
    CHECK(reproduces(cert, "run"));
}

TEST_CASE("cli: selftest passes and is deterministic per seed") {
    const RunResult first = run_cli("selftest --seed 99");
    const RunResult second = run_cli("selftest --seed 99");
    CHECK(first.exit_code == 0);
    CHECK(first.out.find("200/200") != std::string::npos);
    CHECK(first.out.find("500/500") != std::string::npos);
    CHECK(first.out == second.out);
}
