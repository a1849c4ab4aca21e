#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "buckpass/det_game.hpp"
#include "buckpass/graph.hpp"

namespace buckpass {

// Rawlsian social cost: the largest individual cost.
double social_cost(const CostVector& c);
Rat social_cost_rat(const DetCostVector& c);

// Deterministic-game fairness over the full profile space (exact rationals).
struct FairnessReportDet {
    Rat min_sc;
    Rat worst_ne_sc;
    Rat best_ne_sc;
    Rat poa;
    Rat pos;
    PureProfile min_witness;
    PureProfile worst_ne_witness;
    PureProfile best_ne_witness;
    long long ne_count = 0;
};

FairnessReportDet fairness_report_det(const Graph& g, const InitialMeasure& mu,
                                      long long cap = 1000000);

// Parameterized stochastic family: declared parameters in [0,1] and per-player
// rows whose entries are linear expressions in them (numbers, "p", "1-p", ...).
struct ParamFamily {
    struct Entry {
        int target = -1;
        double constant = 0.0;
        std::map<std::string, double> coef;
    };
    std::vector<std::string> params;
    std::vector<std::vector<Entry>> rows; // one list per vertex
};

ParamFamily parse_param_family(const std::string& text, const Graph& g,
                               const std::string& source = "family");

// Instantiate at a parameter point; every row is validated as a proper
// stochastic row on the graph's support.
Eigen::MatrixXd family_profile(const Graph& g, const ParamFamily& fam,
                               const std::vector<double>& theta,
                               const std::string& source = "family");

// Grid + local-bisection search over the family. Equilibria inside the family are
// certified by the per-player deviation grid (deterministic rows + dev_grid_step
// simplex grid), hence "grid-certified", never exact-over-Sigma claims.
struct FairnessReportParam {
    double min_sc = 0.0;
    std::vector<double> min_theta;
    double worst_ne_sc = 0.0;
    std::vector<double> worst_ne_theta;
    double best_ne_sc = 0.0;
    std::vector<double> best_ne_theta;
    double poa = 0.0;
    double pos = 0.0;
    long long ne_grid_points = 0;
    double grid_step = 0.0;
    double dev_grid_step = 0.0;
    int refine_rounds = 0;
    std::string certification = "grid-certified";
};

FairnessReportParam fairness_report_param(const Graph& g, const InitialMeasure& mu,
                                          const ParamFamily& fam, int refine_rounds = 3,
                                          double grid_step = 0.0625,
                                          double dev_grid_step = 0.125);

// Longest simple cycle inside a vertex subset (exhaustive DFS, subset cap 12).
int longest_cycle_length(const Graph& g, const std::vector<int>& vertices, int cap = 12);

} // namespace buckpass
