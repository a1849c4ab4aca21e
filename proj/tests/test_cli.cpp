#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "buckpass/cli.hpp"

using namespace buckpass;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string fixture(const std::string& name, const std::string& content) {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "buckpass_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    return p.string();
}

std::string k3_path() {
    return fixture("k3.json",
                   R"({"n":3,"edges":[[0,1],[0,2],[1,0],[1,2],[2,0],[2,1]]})");
}

std::string k4_path() {
    std::string edges;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            if (!edges.empty()) edges += ",";
            edges += "[" + std::to_string(i) + "," + std::to_string(j) + "]";
        }
    return fixture("k4.json", R"({"n":4,"edges":[)" + edges + "]}");
}

std::string mixed_path() {
    return fixture("mixed.json", R"({"n":3,"edges":[[0,1],[0,2],[1,0],[2,1]]})");
}

std::set<std::string> key_set(const nlohmann::json& j) {
    std::set<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.insert(k);
    return keys;
}

} // namespace

TEST_CASE("nash lists the complete-graph equilibria") {
    const CliRun r = run({"nash", "--graph", k3_path()});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("count").get<int>() == 2);
    REQUIRE(j.at("equilibria").size() == 2);
    CHECK(j.at("equilibria")[0].at("s") == nlohmann::json({1, 2, 0}));
    CHECK(j.at("equilibria")[1].at("s") == nlohmann::json({2, 0, 1}));
    CHECK(j.at("equilibria")[0].at("potential").get<int>() == 0);
}

TEST_CASE("exit codes and diagnostics") {
    SUBCASE("missing file") {
        const CliRun r = run({"nash", "--graph", "/nonexistent/definitely.json"});
        CHECK(r.code == 2);
        CHECK(r.err.find("cannot open file") != std::string::npos);
    }
    SUBCASE("invalid JSON") {
        const CliRun r = run({"nash", "--graph", fixture("bad.json", "{ not json")});
        CHECK(r.code == 2);
        CHECK(r.err.find("error:") != std::string::npos);
    }
    SUBCASE("unknown subcommand prints usage") {
        const CliRun r = run({"frobnicate"});
        CHECK(r.code == 2);
        CHECK(r.err.find("Usage") != std::string::npos);
    }
    SUBCASE("no subcommand") {
        const CliRun r = run({});
        CHECK(r.code == 2);
    }
    SUBCASE("--help succeeds") {
        const CliRun r = run({"--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("nash") != std::string::npos);
        CHECK(r.out.find("tree-theorem") != std::string::npos);
    }
    SUBCASE("enumeration cap is an input error") {
        std::string edges;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                if (i == j) continue;
                if (!edges.empty()) edges += ",";
                edges += "[" + std::to_string(i) + "," + std::to_string(j) + "]";
            }
        const std::string k8 = fixture("k8.json", R"({"n":8,"edges":[)" + edges + "]}");
        const CliRun r = run({"nash", "--graph", k8});
        CHECK(r.code == 2);
    }
}

TEST_CASE("analyze requires exactly one profile flavor and reports the decomposition") {
    const std::string s_ham = fixture("s_ham3.json", R"({"s":[1,2,0]})");
    const std::string pi3 = fixture("pi_ham3.json", R"({"pi":[[0,1,0],[0,0,1],[1,0,0]]})");
    SUBCASE("pure") {
        const CliRun r = run({"analyze", "--graph", k3_path(), "--s", s_ham});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("mode") == "pure");
        CHECK(j.at("potential").get<int>() == 0);
        REQUIRE(j.at("decomposition").size() == 1);
        CHECK(j.at("decomposition")[0].at("cycle").size() == 3);
    }
    SUBCASE("stochastic") {
        const CliRun r = run({"analyze", "--graph", k3_path(), "--pi", pi3});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("mode") == "stochastic");
        CHECK(j.at("classes").size() == 1);
        CHECK(j.at("residual").empty());
    }
    SUBCASE("neither") {
        CHECK(run({"analyze", "--graph", k3_path()}).code == 2);
    }
    SUBCASE("both") {
        CHECK(run({"analyze", "--graph", k3_path(), "--s", s_ham, "--pi", pi3}).code == 2);
    }
}

TEST_CASE("pure and stochastic potentials agree on a lifted profile") {
    const std::string s_ham = fixture("s_ham3.json", R"({"s":[1,2,0]})");
    const std::string pi3 = fixture("pi_ham3.json", R"({"pi":[[0,1,0],[0,0,1],[1,0,0]]})");
    const CliRun pure = run({"potential", "--graph", k3_path(), "--s", s_ham});
    const CliRun stoch = run({"potential", "--graph", k3_path(), "--pi", pi3});
    REQUIRE(pure.code == 0);
    REQUIRE(stoch.code == 0);
    const auto jp = nlohmann::json::parse(pure.out);
    const auto js = nlohmann::json::parse(stoch.out);
    CHECK(jp.at("potential").get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(js.at("potential").get<double>() ==
          doctest::Approx(jp.at("potential").get<double>()).epsilon(1e-9));
}

TEST_CASE("pure dynamics reaches the zero-potential profile on the complete 4-graph") {
    const std::string match = fixture("match4.json", R"({"s":[1,0,3,2]})");
    SUBCASE("max rule") {
        const CliRun r = run({"dynamics", "--graph", k4_path(), "--start", match});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("mode") == "pure");
        CHECK(j.at("length").get<int>() == 2);
        CHECK(j.at("final").at("potential").get<int>() == 0);
        CHECK(j.at("steps")[0].at("kind") == "D2");
    }
    SUBCASE("first rule") {
        const CliRun r =
            run({"dynamics", "--graph", k4_path(), "--start", match, "--rule", "first"});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("final").at("potential").get<int>() == 0);
        CHECK(j.at("length").get<int>() >= 1);
    }
}

TEST_CASE("stochastic dynamics mode and its exclusivity rules") {
    const std::string xi = fixture("xi.json", R"({"grid_step":0.25})");
    const std::string pi = fixture("pi_mixed.json",
                                   R"({"pi":[[0,0.5,0.5],[1,0,0],[0,1,0]]})");
    const std::string start = fixture("s_ham3.json", R"({"s":[1,2,0]})");
    SUBCASE("runs to an epsilon equilibrium") {
        const CliRun r =
            run({"dynamics", "--graph", mixed_path(), "--pi", pi, "--xi", xi});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.at("mode") == "stochastic");
        CHECK(j.at("eps_ne_verified").get<bool>());
        CHECK(j.at("final_costs").size() == 3);
    }
    SUBCASE("both modes at once") {
        CHECK(run({"dynamics", "--graph", mixed_path(), "--start", start, "--xi", xi,
                   "--pi", pi})
                  .code == 2);
    }
    SUBCASE("neither mode") {
        CHECK(run({"dynamics", "--graph", mixed_path()}).code == 2);
    }
    SUBCASE("strategy set without a start point") {
        CHECK(run({"dynamics", "--graph", mixed_path(), "--xi", xi}).code == 2);
    }
}

TEST_CASE("fairness reports the pivot ratios as exact rational strings") {
    const std::string pivot = fixture(
        "pivot.json",
        R"({"n":6,"edges":[[0,1],[0,4],[1,2],[2,3],[3,0],[4,5],[5,4]]})");
    const CliRun r = run({"fairness", "--graph", pivot});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("det").at("poa") == "3");
    CHECK(j.at("det").at("pos") == "3");
    CHECK(j.at("det").at("ne_count").get<int>() == 1);
    CHECK(j.at("det").at("witnesses").at("worst_ne") == nlohmann::json({4, 2, 3, 0, 5, 4}));
}

TEST_CASE("tree-theorem emits exactly the five report fields") {
    const std::string pi = fixture("pi_mixed.json",
                                   R"({"pi":[[0,0.5,0.5],[1,0,0],[0,1,0]]})");
    const CliRun r = run({"tree-theorem", "--graph", mixed_path(), "--pi", pi});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(key_set(j) ==
          std::set<std::string>{"omega", "omega_V", "rho_linear", "rho_trees", "spectral"});
    CHECK(j.at("omega_V").get<double>() == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(j.at("spectral").get<double>() == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(j.at("rho_trees")[0].get<double>() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(j.at("rho_linear")[2].get<double>() == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("simulate is reproducible byte for byte and checks its flags") {
    const std::string pi = fixture("pi_mixed.json",
                                   R"({"pi":[[0,0.5,0.5],[1,0,0],[0,1,0]]})");
    const std::vector<std::string> args = {"--seed", "41",       "simulate", "--graph",
                                           mixed_path(), "--pi", pi,         "--T",
                                           "5000"};
    const CliRun a = run(args);
    const CliRun b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(key_set(j) == std::set<std::string>{"analytic", "empirical", "z_scores"});
    CHECK(j.at("analytic")[0].get<double>() == doctest::Approx(0.4).epsilon(1e-9));
    std::vector<std::string> other = args;
    other[1] = "42";
    CHECK(run(other).out != a.out);
    // profile flags are mutually exclusive and one is required
    const std::string s_ham = fixture("s_ham3.json", R"({"s":[1,2,0]})");
    CHECK(run({"simulate", "--graph", mixed_path()}).code == 2);
    CHECK(run({"simulate", "--graph", mixed_path(), "--s", s_ham, "--pi", pi}).code == 2);
}

TEST_CASE("pagerank subcommand reports choice, rank, rounds") {
    const std::string spec = fixture(
        "pr.json",
        R"({"alpha":0.15,"nu":[0.3,0.3,0.4],
            "link_sets":[[[1],[2],[1,2]],[[0],[2]],[[0],[1]]]})");
    const CliRun r = run({"pagerank", "--spec", spec});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(key_set(j) == std::set<std::string>{"choice", "rank", "rounds"});
    CHECK(j.at("choice").size() == 3);
    CHECK(j.at("rank").size() == 3);
    double total = 0.0;
    for (const auto& x : j.at("rank")) total += x.get<double>();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bhg subcommand climbs from the Hamiltonian cycle to the matching") {
    const std::string ham = fixture("ham4.json", R"({"s":[1,2,3,0]})");
    const CliRun r = run({"bhg", "--graph", k4_path(), "--start", ham});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("length").get<int>() == 2);
    CHECK(j.at("final").at("potential").get<int>() == 4);
    CHECK(j.at("wpfne_sampled").get<bool>());
    CHECK(j.at("final").at("payoffs")[0] == "1/4");
}

TEST_CASE("text format renders key-value lines") {
    const std::string s_ham = fixture("s_ham3.json", R"({"s":[1,2,0]})");
    const CliRun r =
        run({"--format", "text", "potential", "--graph", k3_path(), "--s", s_ham});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("potential: 0") != std::string::npos);
    CHECK(r.out.find("costs: ") != std::string::npos);
    CHECK(r.out.find('{') == std::string::npos); // no JSON braces in text mode
}
