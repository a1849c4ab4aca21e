#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "buckpass/det_game.hpp"
#include "buckpass/graph.hpp"

namespace buckpass {

struct SimConfig {
    long long T = 1000;
    int replicas = 1;
    uint64_t seed = 0;
};

struct SimResult {
    std::vector<double> empirical; // mean over replicas of the per-replica frequency
    std::vector<double> std_error; // sample std dev of replica means / sqrt(replicas)
};

// Draw X_0 from mu, step by pi for T steps, average holding indicators over
// t = 1..T (no burn-in; the time average starts at t = 1). Replica r uses the
// (seed, r) stream of the counter-based generator, so results replay bit-exactly.
SimResult simulate(const Graph& g, const InitialMeasure& mu, const Eigen::MatrixXd& pi,
                   const SimConfig& cfg);
SimResult simulate(const Graph& g, const InitialMeasure& mu, const PureProfile& s,
                   const SimConfig& cfg);

// Raw trajectory X_0..X_T of a single replica (testing hook for periodicity and
// reproducibility checks).
std::vector<int> simulate_trajectory(const Graph& g, const InitialMeasure& mu,
                                     const Eigen::MatrixXd& pi, long long T,
                                     uint64_t seed, uint32_t replica = 0);

// The K_3 illustration that the stochastic game is not the mixed extension of the
// deterministic one: player 0 mixing (1/2, 1/2) over its two pure strategies has
// expected deterministic cost 5/12, while the stochastic cost is 2/5.
struct MixedExtensionReport {
    Rat mixed_cost_player0;      // 5/12, exact
    Rat stoch_cost_player0;      // 2/5, exact via rational tree volumes
    Rat difference;              // 1/60, asserted > 0
};

MixedExtensionReport mixed_extension_check(const Graph& g, const InitialMeasure& mu);

} // namespace buckpass
