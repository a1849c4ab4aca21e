#include "buckpass/det_game.hpp"

#include <algorithm>
#include <optional>

namespace buckpass {

namespace {

std::vector<Rat> rat_measure(const InitialMeasure& mu) {
    std::vector<Rat> m;
    m.reserve(mu.mu.size());
    for (double x : mu.mu) m.push_back(rat_from_double(x));
    return m;
}

std::vector<Rat> costs_from_decomposition(const UnicycleDecomposition& d,
                                          const std::vector<Rat>& mu) {
    std::vector<Rat> mass(static_cast<size_t>(d.count), Rat(0));
    for (size_t v = 0; v < d.label.size(); ++v)
        mass[static_cast<size_t>(d.label[v])] += mu[v];
    std::vector<Rat> c(d.label.size(), Rat(0));
    for (size_t v = 0; v < d.label.size(); ++v) {
        if (!d.on_cycle[v]) continue;
        const auto& comp = d.components[static_cast<size_t>(d.label[v])];
        c[v] = mass[static_cast<size_t>(d.label[v])] / static_cast<int>(comp.cycle.size());
    }
    return c;
}

// The strictly profitable retargeting of `player` to `target`, if it is one.
// Costs are recomputed from scratch on the deviated profile: no structural
// shortcuts, so this doubles as the reference for every caller.
std::optional<Deviation> profitable_move(const Graph& g, const std::vector<Rat>& mu,
                                         const UnicycleDecomposition& d,
                                         const std::vector<Rat>& costs, PureProfile& s,
                                         int player, int target) {
    const size_t pl = static_cast<size_t>(player);
    if (target == s.s[pl] || costs[pl] == 0) return std::nullopt;
    const int old_target = s.s[pl];
    s.s[pl] = target;
    const UnicycleDecomposition d2 = unicycle_decomposition(g, s);
    const std::vector<Rat> c2 = costs_from_decomposition(d2, mu);
    s.s[pl] = old_target;
    if (!(c2[pl] < costs[pl])) return std::nullopt;

    Deviation dev;
    dev.player = player;
    dev.new_target = target;
    dev.improvement = costs[pl] - c2[pl];
    const int lbl = d.label[pl];
    const bool same_comp = d.label[static_cast<size_t>(target)] == lbl;
    if (same_comp && !d.on_cycle[static_cast<size_t>(target)])
        dev.kind = DevKind::D1; // splice a tree vertex in: the cycle got longer
    else if (!same_comp)
        dev.kind = DevKind::D2; // leave the unicycle: cost falls to zero
    else
        throw InternalError("profitable deviation onto the own cycle should be impossible");
    return dev;
}

} // namespace

DetCostVector det_cost_vector(const Graph& g, const InitialMeasure& mu, const PureProfile& s) {
    const UnicycleDecomposition d = unicycle_decomposition(g, s);
    return DetCostVector{costs_from_decomposition(d, rat_measure(mu))};
}

int det_potential(const Graph& g, const PureProfile& s) {
    const UnicycleDecomposition d = unicycle_decomposition(g, s);
    int psi = 0;
    for (const auto& comp : d.components)
        psi += g.n - static_cast<int>(comp.cycle.size());
    return psi;
}

std::vector<Deviation> det_profitable_deviations(const Graph& g, const InitialMeasure& mu,
                                                 const PureProfile& s, int player) {
    const UnicycleDecomposition d = unicycle_decomposition(g, s);
    const std::vector<Rat> m = rat_measure(mu);
    const std::vector<Rat> costs = costs_from_decomposition(d, m);
    PureProfile scratch = s;
    std::vector<Deviation> out;
    for (int target : g.out[static_cast<size_t>(player)])
        if (auto dev = profitable_move(g, m, d, costs, scratch, player, target))
            out.push_back(std::move(*dev));
    return out;
}

ImprovementPath improvement_dynamics(const Graph& g, const InitialMeasure& mu,
                                     const PureProfile& s0, DynRule rule, int cap) {
    const int min_cap = (g.n * g.n + 3) / 4;
    if (cap < min_cap)
        throw ValidationError("dynamics cap must be at least ceil(n^2/4) = " +
                              std::to_string(min_cap));
    const std::vector<Rat> m = rat_measure(mu);
    ImprovementPath path;
    PureProfile cur = s0;
    while (true) {
        const UnicycleDecomposition d = unicycle_decomposition(g, cur);
        const std::vector<Rat> costs = costs_from_decomposition(d, m);
        PureProfile scratch = cur;
        std::optional<Deviation> chosen;
        for (int player = 0; player < g.n && !(chosen && rule == DynRule::FirstImprovement);
             ++player) {
            for (int target : g.out[static_cast<size_t>(player)]) {
                auto dev = profitable_move(g, m, d, costs, scratch, player, target);
                if (!dev) continue;
                if (rule == DynRule::FirstImprovement) {
                    chosen = std::move(dev);
                    break;
                }
                // Max improvement; ties by smallest player id, then target id.
                if (!chosen || dev->improvement > chosen->improvement ||
                    (dev->improvement == chosen->improvement &&
                     (dev->player < chosen->player ||
                      (dev->player == chosen->player && dev->new_target < chosen->new_target))))
                    chosen = std::move(dev);
            }
        }
        if (!chosen) break;
        path.steps.push_back({cur, *chosen});
        cur.s[static_cast<size_t>(chosen->player)] = chosen->new_target;
        if (static_cast<int>(path.steps.size()) >= cap) {
            // The finite-improvement bound caps paths at n^2/4 - 1; hitting the
            // cap with moves still on the table means the engine is broken.
            const UnicycleDecomposition dc = unicycle_decomposition(g, cur);
            const std::vector<Rat> cc = costs_from_decomposition(dc, m);
            PureProfile sc = cur;
            for (int player = 0; player < g.n; ++player)
                for (int target : g.out[static_cast<size_t>(player)])
                    if (profitable_move(g, m, dc, cc, sc, player, target))
                        throw InternalError("improvement dynamics hit the step cap");
            break;
        }
    }
    path.final_profile = cur;
    return path;
}

Graph complete_graph(int n) {
    Graph g;
    g.n = n;
    g.out.assign(static_cast<size_t>(n), {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) g.out[static_cast<size_t>(i)].push_back(j);
    return g;
}

ImprovementPath worstcase_path_construction(int n) {
    if (n < 4 || n % 2 != 0)
        throw ValidationError("worst-case construction needs an even n >= 4, got " +
                              std::to_string(n));
    const Graph g = complete_graph(n);
    const InitialMeasure mu = InitialMeasure::uniform(n);
    const std::vector<Rat> m = rat_measure(mu);

    PureProfile cur;
    cur.s.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; i += 2) {
        cur.s[static_cast<size_t>(i)] = i + 1;
        cur.s[static_cast<size_t>(i + 1)] = i;
    }

    ImprovementPath path;
    auto apply = [&](int player, int target) {
        const UnicycleDecomposition d = unicycle_decomposition(g, cur);
        const std::vector<Rat> costs = costs_from_decomposition(d, m);
        PureProfile scratch = cur;
        auto dev = profitable_move(g, m, d, costs, scratch, player, target);
        if (!dev)
            throw InternalError("worst-case schedule produced an unprofitable step");
        path.steps.push_back({cur, *dev});
        cur.s[static_cast<size_t>(player)] = target;
    };

    // Phase m splices the 2-cycle {v, w} onto the accumulated cycle A: first the
    // tail of A breaks away into it (cost drops to zero), then w re-collects the
    // whole of A one vertex at a time, growing the cycle by one per step.
    std::vector<int> acc = {0, 1};
    for (int m2 = 2; m2 <= n / 2; ++m2) {
        const int v = 2 * m2 - 2, w = 2 * m2 - 1;
        apply(acc.back(), v);
        for (int t = static_cast<int>(acc.size()) - 1; t >= 0; --t)
            apply(w, acc[static_cast<size_t>(t)]);
        acc.push_back(v);
        acc.push_back(w);
    }
    path.final_profile = cur;
    return path;
}

std::vector<PureProfile> enumerate_pure_nash(const Graph& g, const InitialMeasure& mu,
                                             long long cap) {
    long long total = 1;
    for (const auto& lst : g.out) {
        total *= static_cast<long long>(lst.size());
        if (total > cap)
            throw ValidationError("profile space exceeds enumeration cap " + std::to_string(cap));
    }
    const std::vector<Rat> m = rat_measure(mu);
    std::vector<PureProfile> result;
    std::vector<size_t> idx(static_cast<size_t>(g.n), 0);
    while (true) {
        PureProfile s;
        s.s.reserve(static_cast<size_t>(g.n));
        for (int i = 0; i < g.n; ++i)
            s.s.push_back(g.out[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]]);
        const UnicycleDecomposition d = unicycle_decomposition(g, s);
        const std::vector<Rat> costs = costs_from_decomposition(d, m);
        PureProfile scratch = s;
        bool ne = true;
        for (int player = 0; player < g.n && ne; ++player)
            for (int target : g.out[static_cast<size_t>(player)])
                if (profitable_move(g, m, d, costs, scratch, player, target)) {
                    ne = false;
                    break;
                }
        if (ne) result.push_back(std::move(s));
        // Odometer over out-neighbor positions; rightmost digit fastest keeps the
        // output lexicographic in the targets because lists preserve input order
        // only up to their own ordering -- sorted below for the contract.
        int i = g.n - 1;
        while (i >= 0 && ++idx[static_cast<size_t>(i)] == g.out[static_cast<size_t>(i)].size()) {
            idx[static_cast<size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    std::sort(result.begin(), result.end(),
              [](const PureProfile& a, const PureProfile& b) { return a.s < b.s; });
    return result;
}

bool is_prior_free(const Graph& g, const PureProfile& s) {
    const UnicycleDecomposition d = unicycle_decomposition(g, s);
    for (int j = 0; j < g.n; ++j) {
        const std::vector<Rat> m = rat_measure(InitialMeasure::degenerate(g.n, j));
        const std::vector<Rat> costs = costs_from_decomposition(d, m);
        PureProfile scratch = s;
        for (int player = 0; player < g.n; ++player)
            for (int target : g.out[static_cast<size_t>(player)])
                if (profitable_move(g, m, d, costs, scratch, player, target)) return false;
    }
    return true;
}

} // namespace buckpass
