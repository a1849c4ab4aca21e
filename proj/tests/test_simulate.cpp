#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "buckpass/chain.hpp"
#include "buckpass/errors.hpp"
#include "buckpass/simulate.hpp"
#include "oracles.hpp"

using namespace buckpass;

namespace {

Graph mixed_graph() { return oracle::make_graph(3, {{0, 1}, {0, 2}, {1, 0}, {2, 1}}); }

Eigen::MatrixXd mixed_chain() {
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(3, 3);
    pi(0, 1) = 0.5;
    pi(0, 2) = 0.5;
    pi(1, 0) = 1.0;
    pi(2, 1) = 1.0;
    return pi;
}

} // namespace

TEST_CASE("same seed replays bit-exactly; different replicas explore differently") {
    const Graph g = mixed_graph();
    const InitialMeasure mu = InitialMeasure::uniform(3);
    const Eigen::MatrixXd pi = mixed_chain();
    SimConfig cfg;
    cfg.T = 4000;
    cfg.replicas = 3;
    cfg.seed = 77;
    const SimResult a = simulate(g, mu, pi, cfg);
    const SimResult b = simulate(g, mu, pi, cfg);
    CHECK(a.empirical == b.empirical); // bitwise
    CHECK(a.std_error == b.std_error);

    const auto t0 = simulate_trajectory(g, mu, pi, 200, 77, 0);
    const auto t0_again = simulate_trajectory(g, mu, pi, 200, 77, 0);
    const auto t1 = simulate_trajectory(g, mu, pi, 200, 77, 1);
    CHECK(t0 == t0_again);
    CHECK(t0 != t1);

    cfg.seed = 78;
    const SimResult c = simulate(g, mu, pi, cfg);
    CHECK(a.empirical != c.empirical);
}

TEST_CASE("single-replica summary equals the trajectory's own occupation frequencies") {
    const Graph g = mixed_graph();
    const InitialMeasure mu = InitialMeasure::uniform(3);
    const Eigen::MatrixXd pi = mixed_chain();
    SimConfig cfg;
    cfg.T = 1234;
    cfg.replicas = 1;
    cfg.seed = 9001;
    const SimResult res = simulate(g, mu, pi, cfg);
    const auto traj = simulate_trajectory(g, mu, pi, cfg.T, cfg.seed, 0);
    REQUIRE(static_cast<long long>(traj.size()) == cfg.T + 1);
    std::vector<double> freq(3, 0.0);
    for (long long t = 1; t <= cfg.T; ++t) // time average starts at t = 1
        freq[static_cast<size_t>(traj[static_cast<size_t>(t)])] += 1.0 / cfg.T;
    for (int i = 0; i < 3; ++i) {
        CHECK(res.empirical[static_cast<size_t>(i)] ==
              doctest::Approx(freq[static_cast<size_t>(i)]).epsilon(1e-12));
        CHECK(res.std_error[static_cast<size_t>(i)] == 0.0); // one replica: no spread
    }
}

TEST_CASE("a pure profile is followed deterministically after the initial draw") {
    Philox rng(701, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(5));
        const Graph g = oracle::random_graph(rng, n, static_cast<int>(rng.next_below(6)));
        const InitialMeasure mu = oracle::random_measure(rng, n);
        const PureProfile s = oracle::random_profile(rng, g);
        const Eigen::MatrixXd pi = lift_profile(g, s);
        const auto traj = simulate_trajectory(g, mu, pi, 60, 5000 + trial, 0);
        for (size_t t = 0; t + 1 < traj.size(); ++t)
            CHECK(traj[t + 1] == s.s[static_cast<size_t>(traj[t])]);
        // the two simulate overloads share streams and must agree bitwise
        SimConfig cfg;
        cfg.T = 500;
        cfg.replicas = 2;
        cfg.seed = 5000 + static_cast<uint64_t>(trial);
        const SimResult via_matrix = simulate(g, mu, pi, cfg);
        const SimResult via_profile = simulate(g, mu, s, cfg);
        CHECK(via_matrix.empirical == via_profile.empirical);
        CHECK(via_matrix.std_error == via_profile.std_error);
    }
}

TEST_CASE("long-run frequencies concentrate on the stationary distribution") {
    const Graph g = mixed_graph();
    const InitialMeasure mu = InitialMeasure::uniform(3);
    const Eigen::MatrixXd pi = mixed_chain();
    const std::vector<double> target = {0.4, 0.4, 0.2};
    SimConfig cfg;
    cfg.T = 200000;
    cfg.replicas = 5;
    cfg.seed = 20260824;
    const SimResult res = simulate(g, mu, pi, cfg);
    for (int i = 0; i < 3; ++i) {
        const double err = std::abs(res.empirical[static_cast<size_t>(i)] -
                                    target[static_cast<size_t>(i)]);
        CHECK(res.std_error[static_cast<size_t>(i)] > 0.0);
        CHECK(err <= 5.0 * res.std_error[static_cast<size_t>(i)] + 1e-12);
        CHECK(err < 0.01);
    }
}

TEST_CASE("two-cycle alternation: frequencies, variance scaling, exact periodicity") {
    const Graph g = oracle::make_graph(2, {{0, 1}, {1, 0}});
    const InitialMeasure mu = InitialMeasure::uniform(2);
    PureProfile swap;
    swap.s = {1, 0};
    SUBCASE("even horizon is exact, odd horizon is within 1/T") {
        SimConfig cfg;
        cfg.T = 1000;
        cfg.replicas = 1;
        cfg.seed = 3;
        const SimResult res = simulate(g, mu, swap, cfg);
        CHECK(res.empirical[0] == doctest::Approx(0.5).epsilon(1e-12));
        cfg.T = 999;
        const SimResult odd = simulate(g, mu, swap, cfg);
        CHECK(std::abs(odd.empirical[0] - 0.5) <= 1.0 / 999 + 1e-12);
    }
    SUBCASE("standard error of the replica mean shrinks like 1/sqrt(replicas)") {
        // Odd horizon: each replica's frequency is (T+-1)/2T by start parity, so
        // the replica spread is nonzero and the scaling is visible.
        SimConfig small, big;
        small.T = big.T = 101;
        small.replicas = 8;
        big.replicas = 128;
        small.seed = big.seed = 11;
        const SimResult a = simulate(g, mu, swap, small);
        const SimResult b = simulate(g, mu, swap, big);
        REQUIRE(a.std_error[0] > 0.0);
        REQUIRE(b.std_error[0] > 0.0);
        const double ratio = a.std_error[0] / b.std_error[0];
        CHECK(ratio > 4.0 / 3.0); // ideal sqrt(128/8) = 4, order of magnitude only
        CHECK(ratio < 12.0);
    }
    SUBCASE("deterministic trajectories are periodic with the cycle length") {
        Philox rng(703, 0);
        for (int trial = 0; trial < 15; ++trial) {
            const int n = 2 + static_cast<int>(rng.next_below(5));
            const Graph gr = oracle::random_graph(rng, n, static_cast<int>(rng.next_below(6)));
            const PureProfile s = oracle::random_profile(rng, gr);
            const auto traj = simulate_trajectory(gr, InitialMeasure::uniform(n),
                                                  lift_profile(gr, s), 4 * n + 20,
                                                  800 + static_cast<uint64_t>(trial), 0);
            const int period = static_cast<int>(
                oracle::orbit_cycle(s, traj[static_cast<size_t>(n)]).size());
            for (size_t t = static_cast<size_t>(n);
                 t + static_cast<size_t>(period) < traj.size(); ++t)
                CHECK(traj[t + static_cast<size_t>(period)] == traj[t]);
        }
    }
}

TEST_CASE("simulation inputs are validated") {
    const Graph g = mixed_graph();
    const InitialMeasure mu = InitialMeasure::uniform(3);
    const Eigen::MatrixXd pi = mixed_chain();
    SimConfig cfg;
    cfg.T = 0;
    CHECK_THROWS_AS(simulate(g, mu, pi, cfg), ValidationError);
    cfg.T = 10;
    cfg.replicas = 0;
    CHECK_THROWS_AS(simulate(g, mu, pi, cfg), ValidationError);
    cfg.replicas = 1;
    Eigen::MatrixXd bad = pi;
    bad(0, 1) = 0.9; // row sum 1.4
    CHECK_THROWS_AS(simulate(g, mu, bad, cfg), ValidationError);
    bad = pi;
    bad(0, 1) = -0.5;
    bad(0, 2) = 1.5;
    CHECK_THROWS_AS(simulate(g, mu, bad, cfg), ValidationError);
    CHECK_THROWS_AS(simulate(g, mu, Eigen::MatrixXd::Identity(2, 2), cfg), ValidationError);
}

TEST_CASE("mixing pure strategies is not the same game as playing a mixed row") {
    const Graph g = mixed_graph();
    SUBCASE("uniform measure") {
        const MixedExtensionReport rep = mixed_extension_check(g, InitialMeasure::uniform(3));
        CHECK(rep.mixed_cost_player0 == Rat(5, 12));
        CHECK(rep.stoch_cost_player0 == Rat(2, 5));
        CHECK(rep.difference == Rat(1, 60));
    }
    SUBCASE("any fully supported measure gives the same normalized answer") {
        Philox rng(702, 0);
        for (int trial = 0; trial < 10; ++trial) {
            const InitialMeasure mu = oracle::random_measure(rng, 3);
            const MixedExtensionReport rep = mixed_extension_check(g, mu);
            CHECK(rep.mixed_cost_player0 == Rat(5, 12));
            CHECK(rep.stoch_cost_player0 == Rat(2, 5));
            CHECK(rep.difference == Rat(1, 60));
        }
    }
    SUBCASE("only the illustration's shape is accepted") {
        CHECK_THROWS_AS(mixed_extension_check(complete_graph(3), InitialMeasure::uniform(3)),
                        ValidationError);
    }
}
