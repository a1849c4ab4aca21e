#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "buckpass/det_game.hpp"
#include "buckpass/graph.hpp"

namespace buckpass {

// Buck-holding game: same costs, maximized. Deviations are C1 (a recurrent player
// shortens its cycle; payoff scales by old/new length) and C2 (a transient player
// closes a new cycle through itself; needs a fully supported measure to be
// strictly profitable). The measure precondition is enforced.
std::vector<Deviation> bhg_profitable_deviations(const Graph& g, const InitialMeasure& mu,
                                                 const PureProfile& s, int player);

struct BhgResult {
    ImprovementPath path;            // potential strictly ascends along it
    bool wpfne_sampled = false;      // endpoint stayed an equilibrium under 5 sampled
                                     // fully supported measures
};

// Max-improvement ascent (ties: smallest player, then target); terminates within
// the n^2/4 - 1 bound or raises an internal error.
BhgResult bhg_dynamics(const Graph& g, const InitialMeasure& mu, const PureProfile& s0);

// Exact reversal of the worst-case passing schedule on K_n (n even): from the
// Hamiltonian cycle back to the perfect matching, n^2/4 - 1 ascending steps.
ImprovementPath bhg_worstcase_path(int n);

// PageRank game: strategies are admissible out-link subsets, the chain is the
// damped teleporting perturbation, payoff is own stationary mass.
struct PageRankSpec {
    double alpha = 0.15;
    std::vector<double> nu;
    std::vector<std::vector<std::vector<int>>> link_sets; // [player][option][targets]
};

// {"alpha": f, "nu": [floats], "link_sets": [[[int,...],...],...]}.
PageRankSpec parse_pagerank_spec(const std::string& text, const std::string& source = "spec");

// pi_ij = (1-alpha) * 1{j in choice_i}/|choice_i| + alpha * nu_j.
Eigen::MatrixXd pagerank_profile(const PageRankSpec& spec, const std::vector<int>& choice);

struct PageRankResult {
    std::vector<int> choice;    // option index per player
    std::vector<double> rank;   // stationary distribution at the endpoint
    int rounds = 0;             // full best-response sweeps executed
};

// Round-robin best response by player id until a full quiet sweep; the endpoint
// is re-certified against every alternative subset.
PageRankResult pagerank_equilibrium(const PageRankSpec& spec, long long cap = 1000000);

} // namespace buckpass
