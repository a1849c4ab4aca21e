#pragma once

#include <Eigen/Dense>
#include <vector>

#include "buckpass/graph.hpp"

namespace buckpass {

// Row-stochastic matrix supported on the graph's out-neighbors, zero diagonal.
// Chain-level operations below accept any row-stochastic matrix (the PageRank
// chain has a positive diagonal and full support); this wrapper is the validated
// game-profile form.
struct StochasticProfile {
    Eigen::MatrixXd pi;
};

// Validates support/diagonal/row sums against the graph (1e-12 on sums).
StochasticProfile make_profile(const Graph& g, const Eigen::MatrixXd& pi,
                               const std::string& source = "pi");

// Dense {"pi":[[...]]} or sparse {"rows":[{"i":..,"targets":[..],"probs":[..]}]}.
StochasticProfile parse_stochastic_profile(const std::string& text, const Graph& g,
                                           const std::string& source = "pi");

// 0/1 lift of a pure profile.
Eigen::MatrixXd lift_profile(const Graph& g, const PureProfile& s);

struct RecurrentStructure {
    std::vector<std::vector<int>> classes;  // R^l, each sorted, ordered by smallest vertex
    std::vector<std::vector<int>> closures; // T^l = {j : absorption in l is certain}
    std::vector<int> residual;              // W = vertices with no certain destination
    Eigen::MatrixXd absorb;                 // r x n, P^{j->l}
    std::vector<double> class_mass;         // mu^l = sum_j mu_j P^{j->l}
};

// Support digraph = entries > 0 exactly; recurrent classes are its sink SCCs.
// Closures/residual by thresholding absorption probabilities at 1e-9.
RecurrentStructure recurrent_structure(const Eigen::MatrixXd& pi, const InitialMeasure& mu);

// P^{j->l}: 1 on R^l, 0 on other classes, first-step recursion on transient rows,
// solved by dense LU on the transient block.
Eigen::MatrixXd absorption_probabilities(const Eigen::MatrixXd& pi,
                                         const std::vector<std::vector<int>>& classes);

// Extract the |idx| x |idx| sub-matrix in the order given by idx.
Eigen::MatrixXd restrict_matrix(const Eigen::MatrixXd& pi, const std::vector<int>& idx);

// Unique stationary vector of an irreducible row-stochastic matrix: the last
// balance equation is replaced by normalization; residual ||rho pi - rho||_inf
// must come out below 1e-10. Reducible input is a contract violation.
std::vector<double> stationary_distribution(const Eigen::MatrixXd& pi);

// E[T_target | X_0 = j] for every j from which absorption at `target` is certain;
// the target's own entry is the expected first-return time; NaN outside that
// scope. Errors if return to the target is not certain.
std::vector<double> expected_hitting_times(const Eigen::MatrixXd& pi, int target);

} // namespace buckpass
