#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "buckpass/det_game.hpp"
#include "buckpass/errors.hpp"
#include "buckpass/stoch_game.hpp"
#include "oracles.hpp"

using namespace buckpass;

namespace {

// Five vertices; 0<->1 is the central cycle, 2 and 3 can randomize between
// re-entering it and orbiting each other, 4 always feeds in.
Graph discontinuity_graph() {
    return oracle::make_graph(
        5, {{0, 1}, {1, 0}, {2, 0}, {2, 3}, {3, 1}, {3, 2}, {4, 1}});
}

Eigen::MatrixXd discontinuity_profile(double p, double q) {
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(5, 5);
    pi(0, 1) = 1.0;
    pi(1, 0) = 1.0;
    pi(2, 0) = p;
    pi(2, 3) = 1.0 - p;
    pi(3, 1) = q;
    pi(3, 2) = 1.0 - q;
    pi(4, 1) = 1.0;
    return pi;
}

Graph wheel7() {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 6; ++i) {
        edges.push_back({i, (i + 1) % 6});
        edges.push_back({i, 6});
    }
    for (int j = 0; j < 6; ++j) edges.push_back({6, j});
    return oracle::make_graph(7, edges);
}

Eigen::MatrixXd wheel7_center_uniform() {
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(7, 7);
    for (int i = 0; i < 6; ++i) pi(i, (i + 1) % 6) = 1.0;
    for (int j = 0; j < 6; ++j) pi(6, j) = 1.0 / 6.0;
    return pi;
}

} // namespace

TEST_CASE("stochastic costs: the half/half three-vertex instance") {
    const Graph g = oracle::make_graph(3, {{0, 1}, {0, 2}, {1, 0}, {2, 1}});
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(3, 3);
    pi(0, 1) = pi(0, 2) = 0.5;
    pi(1, 0) = 1.0;
    pi(2, 1) = 1.0;
    const GameAnalysis ga = stoch_cost_vector(g, InitialMeasure::uniform(3), pi);
    CHECK(std::abs(ga.costs.c[0] - 0.4) < 1e-12);
    CHECK(std::abs(ga.costs.c[1] - 0.4) < 1e-12);
    CHECK(std::abs(ga.costs.c[2] - 0.2) < 1e-12);
    CHECK(ga.structure.classes.size() == 1);
    CHECK(ga.potential == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("stochastic costs: wheel with a uniformly confused center") {
    const Graph g = wheel7();
    const GameAnalysis ga =
        stoch_cost_vector(g, InitialMeasure::uniform(7), wheel7_center_uniform());
    for (int i = 0; i < 6; ++i) CHECK(std::abs(ga.costs.c[static_cast<size_t>(i)] - 1.0 / 6) < 1e-9);
    CHECK(std::abs(ga.costs.c[6]) < 1e-12);
}

TEST_CASE("0/1 lifts reproduce the deterministic game") {
    Philox rng(401, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(5));
        const Graph g = oracle::random_graph(rng, n, static_cast<int>(rng.next_below(7)));
        const InitialMeasure mu = oracle::random_measure(rng, n, trial % 3 != 0);
        const PureProfile s = oracle::random_profile(rng, g);
        const GameAnalysis ga = stoch_cost_vector(g, mu, lift_profile(g, s));
        const CostVector det = det_cost_vector(g, mu, s).doubles();
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(ga.costs.c[static_cast<size_t>(i)] -
                           det.c[static_cast<size_t>(i)]) < 1e-10);
        CHECK(std::abs(stoch_potential(g, lift_profile(g, s)) -
                       static_cast<double>(det_potential(g, s))) < 1e-9);
    }
}

TEST_CASE("cost vector invariants on random stochastic profiles") {
    Philox rng(402, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(5));
        const Graph g = oracle::random_graph(rng, n, static_cast<int>(rng.next_below(7)));
        const InitialMeasure mu = oracle::random_measure(rng, n);
        const Eigen::MatrixXd pi = oracle::random_row_stochastic(rng, g);
        const GameAnalysis ga = stoch_cost_vector(g, mu, pi);
        double total = 0.0, mass = 0.0;
        for (double c : ga.costs.c) {
            CHECK(c >= -1e-12);
            CHECK(c <= 0.5 + 1e-12);
            total += c;
        }
        for (double m : ga.structure.class_mass) mass += m;
        CHECK(std::abs(total - mass) < 1e-9);
        // fully supported rows => no residual, so the class masses exhaust mu
        CHECK(std::abs(mass - 1.0) < 1e-9);
    }
}

TEST_CASE("potential formula and its discontinuity on the five-vertex example") {
    const Graph g = discontinuity_graph();
    for (double p : {0.1, 0.3, 0.5, 0.9})
        for (double q : {0.2, 0.5, 0.8}) {
            const double psi = stoch_potential(g, discontinuity_profile(p, q));
            CHECK(std::abs(psi - (5.0 - 2.0 * (p + q - p * q))) < 1e-9);
        }
    CHECK(stoch_potential(g, discontinuity_profile(0.5, 0.5)) ==
          doctest::Approx(3.5).epsilon(1e-9));
    // the limit p,q -> 0 is 5, the value at (0,0) is 6: not lower semicontinuous
    CHECK(stoch_potential(g, discontinuity_profile(0.0, 0.0)) ==
          doctest::Approx(6.0).epsilon(1e-9));
    CHECK(stoch_potential(g, discontinuity_profile(1e-4, 1e-4)) ==
          doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("sampled profitable deviations always descend the potential") {
    Philox rng(403, 0);
    int total = 0; // a single instance may be deviation-free within its budget
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(4));
        const Graph g = oracle::random_graph(rng, n, static_cast<int>(rng.next_below(7)));
        const InitialMeasure mu = oracle::random_measure(rng, n);
        const GopReport rep = check_gop(g, mu, 40, 1000 + static_cast<uint64_t>(trial));
        CHECK(rep.violations == 0);
        total += rep.deviations_checked;
    }
    CHECK(total > 0);
}

TEST_CASE("transient players may move the potential at zero cost, and that is not a violation") {
    const Graph g = discontinuity_graph();
    const GopReport rep = check_gop(g, InitialMeasure::uniform(5), 60, 77);
    CHECK(rep.violations == 0);
}

TEST_CASE("grid rows enumerate the discretized simplex") {
    const Graph g = oracle::make_graph(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}});
    const auto rows = grid_rows(g, 0, 0.5);
    REQUIRE(rows.size() == 3); // (1,0), (1/2,1/2), (0,1) over targets {1,2}
    for (const auto& r : rows) {
        CHECK(r.size() == 3);
        CHECK(r[0] == 0.0);
        CHECK(r[1] + r[2] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(grid_rows(g, 0, 0.25).size() == 5);
    CHECK(grid_rows(g, 1, 0.25).size() == 1); // degree one: the deterministic row
    CHECK_THROWS_AS(grid_rows(g, 0, 0.3), ValidationError);
}

TEST_CASE("strategy-set parsing: grid form, explicit form, defaults and errors") {
    const Graph g = oracle::make_graph(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}});
    const FiniteStrategySet grid = parse_strategy_set(R"({"grid_step":0.5})", g);
    CHECK(grid.rows[0].size() == 3);
    CHECK(grid.rows[1].size() == 1);
    const FiniteStrategySet expl = parse_strategy_set(
        R"({"players":[{"i":0,"rows":[[0,0.25,0.75],[0,1,0]]}]})", g);
    CHECK(expl.rows[0].size() == 2);
    CHECK(expl.rows[1].size() == 1); // omitted players fall back to deterministic rows
    CHECK(expl.rows[2].size() == 1);
    CHECK_THROWS_AS(parse_strategy_set(R"({"players":[{"i":0,"rows":[[0.5,0.5,0]]}]})", g),
                    ValidationError); // support violation: 0 -> 0
    CHECK_THROWS_AS(parse_strategy_set(R"({"players":[{"i":0,"rows":[[0,0.5,0.4]]}]})", g),
                    ValidationError); // bad row sum
    CHECK_THROWS_AS(parse_strategy_set(R"({"players":[{"i":0,"rows":[]}]})", g),
                    ValidationError); // empty row list
}

TEST_CASE("epsilon dynamics terminate at certified epsilon-equilibria") {
    Philox rng(404, 0);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(2));
        const Graph g = oracle::random_graph(rng, n, static_cast<int>(rng.next_below(5)));
        const InitialMeasure mu = oracle::random_measure(rng, n);
        const FiniteStrategySet xi = grid_strategy_set(g, 0.25);
        const Eigen::MatrixXd start = oracle::random_row_stochastic(rng, g);
        const double eps = 1e-3;
        const StochPath path = epsilon_dynamics(g, mu, xi, eps, start);
        CHECK(path.eps_ne_verified);
        // independent exhaustive certificate at the endpoint
        const GameAnalysis fin = stoch_cost_vector(g, mu, path.final_pi);
        for (int player = 0; player < n; ++player) {
            Eigen::MatrixXd dev = path.final_pi;
            for (const auto& row : xi.rows[static_cast<size_t>(player)]) {
                for (int j = 0; j < n; ++j) dev(player, j) = row[static_cast<size_t>(j)];
                const GameAnalysis alt = stoch_cost_vector(g, mu, dev);
                CHECK(fin.costs.c[static_cast<size_t>(player)] -
                          alt.costs.c[static_cast<size_t>(player)] <=
                      eps + 1e-12);
            }
        }
    }
}

TEST_CASE("epsilon at the cost cap stops dynamics immediately") {
    const Graph g = complete_graph(4);
    const FiniteStrategySet xi = grid_strategy_set(g, 0.5);
    const Eigen::MatrixXd start = lift_profile(g, PureProfile{{1, 0, 3, 2}});
    const StochPath path = epsilon_dynamics(g, InitialMeasure::uniform(4), xi, 0.5, start);
    CHECK(path.steps.empty());
    CHECK(path.eps_ne_verified);
}

TEST_CASE("deterministic strategy sets make epsilon dynamics a pure-strategy walk") {
    Philox rng(405, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(3));
        const Graph g = oracle::random_graph(rng, n, static_cast<int>(rng.next_below(6)));
        const InitialMeasure mu = oracle::random_measure(rng, n);
        const PureProfile s0 = oracle::random_profile(rng, g);
        const StochPath path = epsilon_dynamics(g, mu, deterministic_strategy_set(g), 1e-9,
                                                lift_profile(g, s0));
        // endpoint is a 0/1 matrix encoding a pure Nash equilibrium
        PureProfile fin;
        fin.s.assign(static_cast<size_t>(n), -1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (path.final_pi(i, j) > 0.5) fin.s[static_cast<size_t>(i)] = j;
        for (int i = 0; i < n; ++i) REQUIRE(fin.s[static_cast<size_t>(i)] >= 0);
        CHECK(oracle::brute_is_ne(g, mu, fin));
    }
}

TEST_CASE("potential descent: deterministic strategy sets yield prior-free equilibria") {
    Philox rng(406, 0);
    int ran = 0;
    for (int trial = 0; trial < 20 && ran < 8; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(3));
        const Graph g = oracle::random_graph(rng, n, n); // extra edges keep it interesting
        // single-class start: the Hamiltonian backbone guarantees one exists
        const FiniteStrategySet xi = deterministic_strategy_set(g);
        Eigen::MatrixXd start;
        bool found = false;
        oracle::for_each_profile(g, [&](const PureProfile& s) {
            if (found) return;
            if (unicycle_decomposition(g, s).count == 1) {
                start = lift_profile(g, s);
                found = true;
            }
        });
        REQUIRE(found);
        ++ran;
        const DescentResult res = potential_descent(g, xi, start);
        CHECK(res.classes_constant);
        PureProfile fin;
        fin.s.assign(static_cast<size_t>(n), -1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (res.pi(i, j) > 0.5) fin.s[static_cast<size_t>(i)] = j;
        CHECK(is_prior_free(g, fin));
        // no unilateral deterministic swap lowers the potential
        const double psi = stoch_potential(g, res.pi);
        for (int i = 0; i < n; ++i) {
            PureProfile alt = fin;
            for (int t : g.out[static_cast<size_t>(i)]) {
                alt.s[static_cast<size_t>(i)] = t;
                CHECK(psi <= stoch_potential(g, lift_profile(g, alt)) + 1e-9);
            }
        }
    }
}

TEST_CASE("potential descent rejects starts that are not class-minimal") {
    // bidirectional 4-cycle: Hamiltonian profiles have one class, matchings two
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 4; ++i) {
        edges.push_back({i, (i + 1) % 4});
        edges.push_back({i, (i + 3) % 4});
    }
    const Graph g = oracle::make_graph(4, edges);
    const FiniteStrategySet xi = deterministic_strategy_set(g);
    const Eigen::MatrixXd matching = lift_profile(g, PureProfile{{1, 0, 3, 2}});
    CHECK_THROWS_AS(potential_descent(g, xi, matching), ValidationError);
    CHECK_NOTHROW(potential_descent(g, xi, lift_profile(g, PureProfile{{1, 2, 3, 0}})));
}

TEST_CASE("pure equilibria survive stochastic deviation checks") {
    // the three-vertex complete graph's Hamiltonian equilibrium
    const Graph k3 = complete_graph(3);
    CHECK(verify_pure_in_stochastic(k3, InitialMeasure::uniform(3), PureProfile{{1, 2, 0}}));
    // non-equilibrium input violates the precondition
    CHECK_THROWS_AS(
        verify_pure_in_stochastic(k3, InitialMeasure::uniform(3), PureProfile{{1, 0, 1}}),
        ValidationError);
    // random instances: every enumerated pure equilibrium passes at grid 1/8
    Philox rng(407, 0);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(2));
        const Graph g = oracle::random_graph(rng, n, static_cast<int>(rng.next_below(6)));
        const InitialMeasure mu = oracle::random_measure(rng, n, trial % 3 != 0);
        for (const PureProfile& s : enumerate_pure_nash(g, mu))
            CHECK(verify_pure_in_stochastic(g, mu, s));
    }
}

TEST_CASE("wheel equilibrium and the center-uniform profile resist stochastic deviations") {
    const Graph g = wheel7();
    const InitialMeasure mu = InitialMeasure::uniform(7);
    PureProfile ne;
    ne.s = {1, 2, 3, 4, 5, 6, 0}; // pivot at 5, center returns to 0
    CHECK(verify_pure_in_stochastic(g, mu, ne));
    CHECK(no_profitable_stoch_deviation(g, mu, wheel7_center_uniform(), 0.0625));
}
