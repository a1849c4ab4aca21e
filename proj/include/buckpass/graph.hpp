#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "buckpass/errors.hpp"

namespace buckpass {

// Simple loop-free directed graph; vertex ids are 0-based, out-neighbor lists keep
// input order and every iteration order derives from them.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> out;

    bool has_edge(int i, int j) const {
        for (int k : out[i])
            if (k == j) return true;
        return false;
    }
    int edge_count() const {
        int m = 0;
        for (const auto& lst : out) m += static_cast<int>(lst.size());
        return m;
    }
};

// Probability vector over vertices.
struct InitialMeasure {
    std::vector<double> mu;

    bool full_support() const {
        for (double x : mu)
            if (!(x > 0.0)) return false;
        return true;
    }
    static InitialMeasure uniform(int n) {
        return InitialMeasure{std::vector<double>(static_cast<size_t>(n), 1.0 / n)};
    }
    static InitialMeasure degenerate(int n, int j) {
        InitialMeasure m{std::vector<double>(static_cast<size_t>(n), 0.0)};
        m.mu[static_cast<size_t>(j)] = 1.0;
        return m;
    }
};

// One designated out-neighbor per vertex.
struct PureProfile {
    std::vector<int> s;
    bool operator==(const PureProfile& o) const { return s == o.s; }
};

// A unicycle: vertex set T with its unique cycle R (|R| >= 2), everything in T
// reaches R by following the profile.
struct Unicycle {
    std::vector<int> vertices; // sorted ascending
    std::vector<int> cycle;    // traversal order, starting at the smallest cycle vertex
};

struct UnicycleDecomposition {
    int count = 0;
    std::vector<Unicycle> components; // ordered by smallest contained vertex
    std::vector<int> label;           // per-vertex component index
    std::vector<char> on_cycle;       // per-vertex delta_i
};

struct SccResult {
    std::vector<std::vector<int>> components;          // each sorted ascending
    std::vector<int> comp_of;                          // vertex -> component index
    std::vector<std::pair<int, int>> condensation_edges; // deduplicated, no self-edges
};

// --- parsing ---------------------------------------------------------------

// Graph JSON: {"n": int, "edges": [[from,to],...], "mu": [floats] (optional)}.
// Out-neighbor order is the order of edge appearance. Distinct errors name the
// offending vertex/field; `source` prefixes messages (usually the filename).
std::pair<Graph, std::optional<InitialMeasure>> parse_graph(const std::string& text,
                                                            const std::string& source = "graph");

// Validates a measure against a graph size: length, nonnegativity, sum within 1e-12.
void validate_measure(const InitialMeasure& mu, int n, const std::string& source = "mu");

// Profile JSON: {"s":[int,...]}; entries must be out-neighbors.
PureProfile parse_profile(const std::string& text, const Graph& g,
                          const std::string& source = "profile");

// --- structure -------------------------------------------------------------

SccResult strongly_connected_components(const Graph& g);

// Same algorithm on a raw adjacency list (used for stochastic supports, where
// self-loops may exist and the Graph invariants don't apply).
SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj);

UnicycleDecomposition unicycle_decomposition(const Graph& g, const PureProfile& s);

// All `root`-rooted spanning trees on `vertices`: every non-root vertex picks one
// outgoing edge (within `support`), no cycles, root picks none. Edges returned as
// (vertex, target) lists in lexicographic enumeration order.
std::vector<std::vector<std::pair<int, int>>> enumerate_rooted_trees(
    const std::vector<int>& vertices, int root,
    const std::function<bool(int, int)>& support, int cap = 10);

} // namespace buckpass
