#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "buckpass/graph.hpp"

namespace buckpass {

// Tree volumes Omega_i on a closed vertex set with a single recurrent class.
// Indexing follows the closure vector passed in.
struct TreeVolumes {
    std::vector<double> omega;      // determinant route: det of L with row/col i removed
    std::vector<double> omega_enum; // enumeration route (filled when |closure| <= cap)
    double omega_V = 0.0;
    std::string method;             // "enumeration+determinant" or "determinant"
};

// Product of pi over the edge set; empty product is 1.
double edge_set_weight(const Eigen::MatrixXd& pi, const std::vector<std::pair<int, int>>& edges);

// Both routes when the closure is small (<= enum_cap vertices): spanning trees of
// the complete graph on the closure with zero-weight edges pruned, and cofactor
// determinants of L = I - pi. The two must agree within 1e-9 relative.
TreeVolumes tree_volumes(const Eigen::MatrixXd& pi, const std::vector<int>& closure,
                         int enum_cap = 10);

// rho(i) = Omega_i / Omega_V over the closure (zero on its transient vertices).
std::vector<double> stationary_via_trees(const Eigen::MatrixXd& pi,
                                         const std::vector<int>& closure);

// Product of the nonzero eigenvalues of L = I - pi on the closure. The product's
// imaginary residue must be < 1e-7 of its modulus; two near-zero eigenvalues
// signal a multi-class closure and raise an error.
double omega_spectral(const Eigen::MatrixXd& pi, const std::vector<int>& closure);

// Adjugate as the full cofactor matrix; capped at 12x12.
Eigen::MatrixXd adjugate(const Eigen::MatrixXd& m);

// E_Q[Lambda]: exhaustive over all pure profiles on the closure's support; Lambda
// is the cycle length of spanning unicycles, zero otherwise. Capped at 10 vertices.
double expected_cycle_length(const Eigen::MatrixXd& pi, const std::vector<int>& closure);

} // namespace buckpass
