#include "buckpass/graph.hpp"

#include <algorithm>
#include <cmath>

#include "buckpass/json_io.hpp"

namespace buckpass {

namespace {

int require_int(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number_integer())
        throw ValidationError(where + ": expected an integer");
    return j.get<int>();
}

} // namespace

std::pair<Graph, std::optional<InitialMeasure>> parse_graph(const std::string& text,
                                                            const std::string& source) {
    const nlohmann::json j = parse_json_text(text, source);
    if (!j.is_object())
        throw ValidationError(source + ": top level must be an object");
    if (!j.contains("n"))
        throw ValidationError(source + ": field \"n\" is required");
    const int n = require_int(j.at("n"), source + ": field \"n\"");
    if (n <= 0)
        throw ValidationError(source + ": field \"n\" must be positive");
    if (!j.contains("edges") || !j.at("edges").is_array())
        throw ValidationError(source + ": field \"edges\" must be an array of [from,to] pairs");

    Graph g;
    g.n = n;
    g.out.assign(static_cast<size_t>(n), {});
    size_t k = 0;
    for (const auto& e : j.at("edges")) {
        const std::string where = source + ": field \"edges\"[" + std::to_string(k) + "]";
        ++k;
        if (!e.is_array() || e.size() != 2)
            throw ValidationError(where + ": expected a [from,to] pair");
        const int from = require_int(e[0], where);
        const int to = require_int(e[1], where);
        if (from < 0 || from >= n || to < 0 || to >= n)
            throw ValidationError(where + ": vertex id out of range [0," + std::to_string(n - 1) + "]");
        if (from == to)
            throw ValidationError(where + ": loop edge at vertex " + std::to_string(from) + " not allowed");
        if (g.has_edge(from, to))
            throw ValidationError(where + ": duplicate edge from vertex " + std::to_string(from) +
                                  " to " + std::to_string(to));
        g.out[static_cast<size_t>(from)].push_back(to);
    }
    for (int v = 0; v < n; ++v)
        if (g.out[static_cast<size_t>(v)].empty())
            throw ValidationError(source + ": vertex " + std::to_string(v) + " has no outgoing edges");

    std::optional<InitialMeasure> mu;
    if (j.contains("mu")) {
        if (!j.at("mu").is_array())
            throw ValidationError(source + ": field \"mu\" must be an array of numbers");
        InitialMeasure m;
        for (const auto& x : j.at("mu")) {
            if (!x.is_number())
                throw ValidationError(source + ": field \"mu\" must be an array of numbers");
            m.mu.push_back(x.get<double>());
        }
        validate_measure(m, n, source + ": field \"mu\"");
        mu = std::move(m);
    }
    return {std::move(g), std::move(mu)};
}

void validate_measure(const InitialMeasure& mu, int n, const std::string& source) {
    if (static_cast<int>(mu.mu.size()) != n)
        throw ValidationError(source + ": length " + std::to_string(mu.mu.size()) +
                              " does not match vertex count " + std::to_string(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = mu.mu[static_cast<size_t>(i)];
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ValidationError(source + ": entry for vertex " + std::to_string(i) +
                                  " must be a nonnegative finite number");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError(source + ": entries must sum to 1 within 1e-12 (got " +
                              std::to_string(sum) + ")");
}

PureProfile parse_profile(const std::string& text, const Graph& g, const std::string& source) {
    const nlohmann::json j = parse_json_text(text, source);
    if (!j.is_object() || !j.contains("s") || !j.at("s").is_array())
        throw ValidationError(source + ": expected an object with array field \"s\"");
    PureProfile p;
    for (const auto& x : j.at("s"))
        p.s.push_back(require_int(x, source + ": field \"s\""));
    if (static_cast<int>(p.s.size()) != g.n)
        throw ValidationError(source + ": field \"s\" length " + std::to_string(p.s.size()) +
                              " does not match vertex count " + std::to_string(g.n));
    for (int i = 0; i < g.n; ++i) {
        const int t = p.s[static_cast<size_t>(i)];
        if (t == i)
            throw ValidationError(source + ": field \"s\"[" + std::to_string(i) +
                                  "] targets the vertex itself");
        if (t < 0 || t >= g.n || !g.has_edge(i, t))
            throw ValidationError(source + ": field \"s\"[" + std::to_string(i) + "] = " +
                                  std::to_string(t) + " is not an out-neighbor of vertex " +
                                  std::to_string(i));
    }
    return p;
}

namespace {

// Tarjan's algorithm; component discovery order is reverse-topological and the
// DFS root order follows vertex ids, so output is deterministic.
struct TarjanState {
    const std::vector<std::vector<int>>& adj;
    std::vector<int> index, lowlink, stack;
    std::vector<char> on_stack;
    std::vector<std::vector<int>> components;
    std::vector<int> comp_of;
    int next_index = 0;

    explicit TarjanState(const std::vector<std::vector<int>>& a)
        : adj(a),
          index(a.size(), -1),
          lowlink(a.size(), 0),
          on_stack(a.size(), 0),
          comp_of(a.size(), -1) {}

    void dfs(int v) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
        for (int w : adj[static_cast<size_t>(v)]) {
            if (index[w] == -1) {
                dfs(w);
                lowlink[v] = std::min(lowlink[v], lowlink[w]);
            } else if (on_stack[w]) {
                lowlink[v] = std::min(lowlink[v], index[w]);
            }
        }
        if (lowlink[v] == index[v]) {
            std::vector<int> comp;
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = 0;
                comp_of[w] = static_cast<int>(components.size());
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            components.push_back(std::move(comp));
        }
    }
};

} // namespace

SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    TarjanState st(adj);
    for (int v = 0; v < static_cast<int>(adj.size()); ++v)
        if (st.index[v] == -1) st.dfs(v);

    SccResult res;
    res.components = std::move(st.components);
    res.comp_of = std::move(st.comp_of);
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < static_cast<int>(adj.size()); ++v)
        for (int w : adj[static_cast<size_t>(v)]) {
            const int a = res.comp_of[static_cast<size_t>(v)];
            const int b = res.comp_of[static_cast<size_t>(w)];
            if (a != b) edges.emplace_back(a, b);
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    res.condensation_edges = std::move(edges);
    return res;
}

SccResult strongly_connected_components(const Graph& g) {
    return strongly_connected_components(g.out);
}

UnicycleDecomposition unicycle_decomposition(const Graph& g, const PureProfile& s) {
    const int n = g.n;
    UnicycleDecomposition d;
    d.label.assign(static_cast<size_t>(n), -1);
    d.on_cycle.assign(static_cast<size_t>(n), 0);

    // Walk the functional graph from every vertex; the first revisit inside the
    // current walk closes a new cycle, a revisit of older territory joins it.
    std::vector<int> state(static_cast<size_t>(n), 0); // 0 fresh, 1 in walk, 2 done
    for (int start = 0; start < n; ++start) {
        if (state[static_cast<size_t>(start)] != 0) continue;
        std::vector<int> walk;
        int v = start;
        while (state[static_cast<size_t>(v)] == 0) {
            state[static_cast<size_t>(v)] = 1;
            walk.push_back(v);
            v = s.s[static_cast<size_t>(v)];
        }
        int comp;
        if (state[static_cast<size_t>(v)] == 1) {
            // New cycle discovered: v is the entry point of the cycle in `walk`.
            comp = static_cast<int>(d.components.size());
            d.components.emplace_back();
            auto it = std::find(walk.begin(), walk.end(), v);
            for (auto c = it; c != walk.end(); ++c) {
                d.on_cycle[static_cast<size_t>(*c)] = 1;
                d.components[static_cast<size_t>(comp)].cycle.push_back(*c);
            }
        } else {
            comp = d.label[static_cast<size_t>(v)];
        }
        for (int w : walk) {
            state[static_cast<size_t>(w)] = 2;
            d.label[static_cast<size_t>(w)] = comp;
        }
    }

    for (int v = 0; v < n; ++v)
        d.components[static_cast<size_t>(d.label[static_cast<size_t>(v)])].vertices.push_back(v);

    // Canonical form: components ordered by smallest contained vertex, cycles
    // rotated to start at their smallest vertex.
    std::vector<int> order(d.components.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return d.components[static_cast<size_t>(a)].vertices.front() <
               d.components[static_cast<size_t>(b)].vertices.front();
    });
    std::vector<Unicycle> comps;
    std::vector<int> new_of(order.size());
    for (size_t i = 0; i < order.size(); ++i) {
        new_of[static_cast<size_t>(order[i])] = static_cast<int>(i);
        auto& uc = d.components[static_cast<size_t>(order[i])];
        auto mn = std::min_element(uc.cycle.begin(), uc.cycle.end());
        std::rotate(uc.cycle.begin(), mn, uc.cycle.end());
        comps.push_back(std::move(uc));
    }
    d.components = std::move(comps);
    for (int v = 0; v < n; ++v)
        d.label[static_cast<size_t>(v)] = new_of[static_cast<size_t>(d.label[static_cast<size_t>(v)])];
    d.count = static_cast<int>(d.components.size());
    return d;
}

namespace {

void rec_trees(const std::vector<int>& verts, int root, size_t pos,
               const std::function<bool(int, int)>& support,
               std::vector<int>& choice, // target per position, -1 for root
               std::vector<std::vector<std::pair<int, int>>>& out) {
    const size_t k = verts.size();
    if (pos == k) {
        std::vector<std::pair<int, int>> edges;
        for (size_t i = 0; i < k; ++i)
            if (choice[i] >= 0) edges.emplace_back(verts[i], choice[i]);
        out.push_back(std::move(edges));
        return;
    }
    if (verts[pos] == root) {
        choice[pos] = -1;
        rec_trees(verts, root, pos + 1, support, choice, out);
        return;
    }
    for (size_t j = 0; j < k; ++j) {
        if (j == pos) continue;
        const int target = verts[j];
        if (!support(verts[pos], target)) continue;
        // Acyclicity: chase already-assigned targets from `target`; returning to
        // the current vertex would close a cycle.
        bool cycles = false;
        int v = target;
        while (true) {
            if (v == verts[pos]) { cycles = true; break; }
            if (v == root) break;
            const auto it = std::find(verts.begin(), verts.end(), v);
            const size_t vp = static_cast<size_t>(it - verts.begin());
            if (vp >= pos || choice[vp] < 0) break; // not assigned yet
            v = choice[vp];
        }
        if (cycles) continue;
        choice[pos] = target;
        rec_trees(verts, root, pos + 1, support, choice, out);
    }
    choice[pos] = -1;
}

} // namespace

std::vector<std::vector<std::pair<int, int>>> enumerate_rooted_trees(
    const std::vector<int>& vertices, int root, const std::function<bool(int, int)>& support,
    int cap) {
    if (static_cast<int>(vertices.size()) > cap)
        throw ValidationError("rooted-tree enumeration limited to " + std::to_string(cap) +
                              " vertices, got " + std::to_string(vertices.size()));
    std::vector<int> verts = vertices;
    std::sort(verts.begin(), verts.end());
    if (std::find(verts.begin(), verts.end(), root) == verts.end())
        throw ValidationError("root " + std::to_string(root) + " is not in the vertex set");
    std::vector<std::vector<std::pair<int, int>>> out;
    std::vector<int> choice(verts.size(), -1);
    rec_trees(verts, root, 0, support, choice, out);
    return out;
}

} // namespace buckpass
