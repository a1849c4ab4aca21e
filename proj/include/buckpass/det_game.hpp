#pragma once

#include <vector>

#include "buckpass/graph.hpp"
#include "buckpass/rational.hpp"

namespace buckpass {

// Double-precision cost vector (stochastic game, fairness, simulator).
struct CostVector {
    std::vector<double> c;
};

// Deterministic-game costs are exact rationals: mu entries convert exactly from
// double and everything else is small-integer arithmetic.
struct DetCostVector {
    std::vector<Rat> c;
    CostVector doubles() const {
        CostVector v;
        v.c.reserve(c.size());
        for (const auto& r : c) v.c.push_back(rat_to_double(r));
        return v;
    }
};

enum class DevKind { D1, D2, C1, C2 };

inline const char* dev_kind_name(DevKind k) {
    switch (k) {
        case DevKind::D1: return "D1";
        case DevKind::D2: return "D2";
        case DevKind::C1: return "C1";
        case DevKind::C2: return "C2";
    }
    return "?";
}

struct Deviation {
    int player = -1;
    int new_target = -1;
    DevKind kind = DevKind::D1;
    Rat improvement; // strictly positive
};

struct ImprovementStep {
    PureProfile before;
    Deviation dev;
};

struct ImprovementPath {
    std::vector<ImprovementStep> steps;
    PureProfile final_profile;
};

enum class DynRule { MaxImprovement, FirstImprovement };

// c_i = (mass of i's unicycle) / |cycle| when i sits on the cycle, else 0.
DetCostVector det_cost_vector(const Graph& g, const InitialMeasure& mu, const PureProfile& s);

// Psi(sigma) = sum over unicycles of (n - cycle length).
int det_potential(const Graph& g, const PureProfile& s);

// Exactly the strictly profitable unilateral retargetings of `player`, classified
// D1 (stays in its unicycle, cycle grows) / D2 (leaves, cost drops to zero).
// Ordered by target position in the out-neighbor list.
std::vector<Deviation> det_profitable_deviations(const Graph& g, const InitialMeasure& mu,
                                                 const PureProfile& s, int player);

// Iterate profitable deviations until none remain. Max-improvement breaks ties by
// smallest player id then smallest target id; first-improvement takes the smallest
// player's first profitable target. `cap` must be >= ceil(n^2/4); reaching it is an
// internal error (the finite-improvement bound guarantees termination before it).
ImprovementPath improvement_dynamics(const Graph& g, const InitialMeasure& mu,
                                     const PureProfile& s0, DynRule rule, int cap);

// The tight worst case on the complete graph K_n (n even, uniform measure): start
// from disjoint 2-cycles, repeatedly break one and splice it into the growing
// cycle; exactly n^2/4 - 1 steps, Hamiltonian endpoint.
ImprovementPath worstcase_path_construction(int n);

Graph complete_graph(int n);

// All pure Nash equilibria, lexicographic order. Errors when the profile count
// exceeds `cap`.
std::vector<PureProfile> enumerate_pure_nash(const Graph& g, const InitialMeasure& mu,
                                             long long cap = 1000000);

// Nash under every initial measure <=> Nash under all n degenerate measures
// (costs are linear in mu), which is the finite test run here.
bool is_prior_free(const Graph& g, const PureProfile& s);

} // namespace buckpass
