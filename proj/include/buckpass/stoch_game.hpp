#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "buckpass/chain.hpp"
#include "buckpass/det_game.hpp"
#include "buckpass/graph.hpp"

namespace buckpass {

// Finite (or grid-discretized) strategy sets: per player, a list of admissible
// full-length probability rows supported on the player's out-neighbors.
struct FiniteStrategySet {
    std::vector<std::vector<std::vector<double>>> rows; // [player][row][vertex]
};

// {"players":[{"i":int,"rows":[[floats]]}]} or {"grid_step": f}. Players omitted
// from the explicit form keep their full deterministic row set.
FiniteStrategySet parse_strategy_set(const std::string& text, const Graph& g,
                                     const std::string& source = "xi");

// All rows with entries k*step on the player's support simplex.
std::vector<std::vector<double>> grid_rows(const Graph& g, int player, double step);
FiniteStrategySet grid_strategy_set(const Graph& g, double step);
FiniteStrategySet deterministic_strategy_set(const Graph& g);

struct GameAnalysis {
    CostVector costs;                         // c_i = sum_l mass_l * rho^l(i)
    double potential = 0.0;                   // sum_l (n - Omega^l)
    RecurrentStructure structure;
    std::vector<std::vector<double>> per_class_rho; // full-length, zero off-class
};

GameAnalysis stoch_cost_vector(const Graph& g, const InitialMeasure& mu,
                               const Eigen::MatrixXd& pi);

double stoch_potential(const Graph& g, const Eigen::MatrixXd& pi);

struct GopReport {
    int deviations_checked = 0;
    int violations = 0;
    std::vector<std::string> notes; // e.g. potential motion at zero cost change
};

// Samples random profiles on g and hunts for profitable unilateral deviations
// (deterministic rows + a coarse simplex grid); every one found must strictly
// decrease the potential. Violations are counted, never thrown.
GopReport check_gop(const Graph& g, const InitialMeasure& mu, int trials, uint64_t seed);

struct StochStep {
    int player = -1;
    std::vector<double> new_row;
    double improvement = 0.0;
};

struct StochPath {
    std::vector<StochStep> steps;
    Eigen::MatrixXd final_pi;
    bool eps_ne_verified = false;
};

// Applies deviations within Xi whose improvement exceeds eps (max-improvement,
// ties by smallest player then row index) until none remain; the exit condition
// re-checked against every row is the epsilon-equilibrium certificate.
StochPath epsilon_dynamics(const Graph& g, const InitialMeasure& mu,
                           const FiniteStrategySet& xi, double eps,
                           const Eigen::MatrixXd& start);

struct DescentResult {
    Eigen::MatrixXd pi;
    int steps = 0;
    bool classes_constant = true; // class count never moved along the run
};

// Greedy potential minimization over recurrent-player deviations in Xi; the start
// must attain the minimal class count over all of Xi (checked by exhaustive scan,
// capped). Endpoint minimizes Psi against every admissible unilateral swap.
DescentResult potential_descent(const Graph& g, const FiniteStrategySet& xi,
                                const Eigen::MatrixXd& start, long long scan_cap = 1000000);

// True iff no unilateral stochastic deviation (all deterministic rows plus the
// step-grid on the deviator's simplex) improves on the 0/1 lift of s by more than
// 1e-9. Precondition: s is a pure Nash equilibrium.
bool verify_pure_in_stochastic(const Graph& g, const InitialMeasure& mu,
                               const PureProfile& s, double grid_step = 0.125);

// Shared deviation scan used by the verifier and the fairness reports: true if no
// player can lower their cost by more than `margin` using a deterministic or
// grid row.
bool no_profitable_stoch_deviation(const Graph& g, const InitialMeasure& mu,
                                   const Eigen::MatrixXd& pi, double grid_step,
                                   double margin = 1e-9);

} // namespace buckpass
