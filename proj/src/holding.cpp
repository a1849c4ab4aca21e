#include "buckpass/holding.hpp"

#include <algorithm>
#include <cmath>

#include "buckpass/chain.hpp"
#include "buckpass/errors.hpp"
#include "buckpass/json_io.hpp"
#include "buckpass/philox.hpp"

namespace buckpass {

namespace {

std::vector<Rat> rat_measure(const InitialMeasure& mu) {
    std::vector<Rat> m;
    m.reserve(mu.mu.size());
    for (double x : mu.mu) m.push_back(rat_from_double(x));
    return m;
}

std::vector<Rat> payoffs(const Graph& g, const std::vector<Rat>& mu_rat,
                         const PureProfile& s, UnicycleDecomposition* out_dec = nullptr) {
    UnicycleDecomposition dec = unicycle_decomposition(g, s);
    std::vector<Rat> pay(static_cast<size_t>(g.n), Rat(0));
    for (const auto& comp : dec.components) {
        Rat mass(0);
        for (int v : comp.vertices) mass += mu_rat[static_cast<size_t>(v)];
        if (mass == 0) continue;
        const Rat share = mass / Rat(static_cast<long>(comp.cycle.size()));
        for (int v : comp.cycle) pay[static_cast<size_t>(v)] = share;
    }
    if (out_dec) *out_dec = std::move(dec);
    return pay;
}

} // namespace

std::vector<Deviation> bhg_profitable_deviations(const Graph& g, const InitialMeasure& mu,
                                                 const PureProfile& s, int player) {
    if (!mu.full_support())
        throw ValidationError(
            "holding-game deviations need a fully supported initial measure");
    if (player < 0 || player >= g.n)
        throw ValidationError("player id " + std::to_string(player) + " out of range");
    const std::vector<Rat> mu_rat = rat_measure(mu);
    UnicycleDecomposition dec;
    const std::vector<Rat> base = payoffs(g, mu_rat, s, &dec);
    const bool was_recurrent = dec.on_cycle[static_cast<size_t>(player)] != 0;
    std::vector<Deviation> devs;
    PureProfile t = s;
    for (int target : g.out[static_cast<size_t>(player)]) {
        if (target == s.s[static_cast<size_t>(player)]) continue;
        t.s[static_cast<size_t>(player)] = target;
        const std::vector<Rat> after = payoffs(g, mu_rat, t);
        const Rat gain = after[static_cast<size_t>(player)] - base[static_cast<size_t>(player)];
        if (gain > 0) {
            Deviation d;
            d.player = player;
            d.new_target = target;
            d.kind = was_recurrent ? DevKind::C1 : DevKind::C2;
            d.improvement = gain;
            devs.push_back(d);
        }
    }
    t.s[static_cast<size_t>(player)] = s.s[static_cast<size_t>(player)];
    return devs;
}

BhgResult bhg_dynamics(const Graph& g, const InitialMeasure& mu, const PureProfile& s0) {
    if (!mu.full_support())
        throw ValidationError("holding-game dynamics need a fully supported initial measure");
    if (static_cast<int>(s0.s.size()) != g.n)
        throw ValidationError("start profile length does not match the graph");
    BhgResult res;
    PureProfile cur = s0;
    const long long cap = std::max(4LL, static_cast<long long>(g.n) * g.n);
    int psi_prev = det_potential(g, cur);
    for (long long step = 0;; ++step) {
        Deviation best;
        bool found = false;
        for (int player = 0; player < g.n; ++player)
            for (const Deviation& d : bhg_profitable_deviations(g, mu, cur, player))
                if (!found || d.improvement > best.improvement) {
                    best = d; // scan order already breaks ties by player then target
                    found = true;
                }
        if (!found) break;
        if (step >= cap)
            throw InternalError(
                "holding-game ascent exceeded the finite-improvement bound");
        ImprovementStep st;
        st.before = cur;
        st.dev = best;
        res.path.steps.push_back(st);
        cur.s[static_cast<size_t>(best.player)] = best.new_target;
        const int psi_now = det_potential(g, cur);
        if (psi_now <= psi_prev)
            throw InternalError("holding-game potential failed to ascend on an improvement");
        psi_prev = psi_now;
    }
    res.path.final_profile = cur;

    // The endpoint must stay an equilibrium under sampled fully supported measures.
    res.wpfne_sampled = true;
    Philox rng(0x5EEDULL, 0xB46);
    for (int trial = 0; trial < 5 && res.wpfne_sampled; ++trial) {
        InitialMeasure m;
        m.mu.resize(static_cast<size_t>(g.n));
        double tot = 0.0;
        for (double& x : m.mu) {
            x = 0.05 + rng.next_double();
            tot += x;
        }
        for (double& x : m.mu) x /= tot;
        for (int player = 0; player < g.n && res.wpfne_sampled; ++player)
            if (!bhg_profitable_deviations(g, m, cur, player).empty()) res.wpfne_sampled = false;
    }
    return res;
}

ImprovementPath bhg_worstcase_path(int n) {
    const ImprovementPath forward = worstcase_path_construction(n);
    const InitialMeasure mu = InitialMeasure::uniform(n);
    const Graph g = complete_graph(n);
    ImprovementPath back;
    back.final_profile = forward.steps.front().before;
    PureProfile cur = forward.final_profile;
    for (auto it = forward.steps.rbegin(); it != forward.steps.rend(); ++it) {
        const int player = it->dev.player;
        const int undo_target = it->before.s[static_cast<size_t>(player)];
        const auto devs = bhg_profitable_deviations(g, mu, cur, player);
        const auto match = std::find_if(devs.begin(), devs.end(), [&](const Deviation& d) {
            return d.new_target == undo_target;
        });
        if (match == devs.end())
            throw InternalError("reversed passing step is not a profitable holding move");
        ImprovementStep st;
        st.before = cur;
        st.dev = *match;
        back.steps.push_back(st);
        cur.s[static_cast<size_t>(player)] = undo_target;
    }
    if (!(cur == back.final_profile))
        throw InternalError("reversed path did not land on the matching profile");
    return back;
}

PageRankSpec parse_pagerank_spec(const std::string& text, const std::string& source) {
    const nlohmann::json j = parse_json_text(text, source);
    if (!j.is_object() || !j.contains("alpha") || !j.contains("nu") || !j.contains("link_sets"))
        throw ValidationError(source + ": expected \"alpha\", \"nu\", \"link_sets\"");
    PageRankSpec spec;
    if (!j.at("alpha").is_number())
        throw ValidationError(source + ": field \"alpha\" must be a number");
    spec.alpha = j.at("alpha").get<double>();
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0))
        throw ValidationError(source + ": field \"alpha\" must lie strictly between 0 and 1");
    if (!j.at("nu").is_array())
        throw ValidationError(source + ": field \"nu\" must be an array");
    double tot = 0.0;
    for (const auto& x : j.at("nu")) {
        if (!x.is_number())
            throw ValidationError(source + ": field \"nu\" must contain numbers");
        const double v = x.get<double>();
        if (!(v > 0.0))
            throw ValidationError(source + ": field \"nu\" entries must be strictly positive");
        spec.nu.push_back(v);
        tot += v;
    }
    const int n = static_cast<int>(spec.nu.size());
    if (n < 2) throw ValidationError(source + ": need at least two pages");
    if (std::abs(tot - 1.0) > 1e-9)
        throw ValidationError(source + ": field \"nu\" must sum to 1");
    if (!j.at("link_sets").is_array() || static_cast<int>(j.at("link_sets").size()) != n)
        throw ValidationError(source + ": field \"link_sets\" needs one option list per page");
    for (int i = 0; i < n; ++i) {
        const auto& opts = j.at("link_sets")[static_cast<size_t>(i)];
        if (!opts.is_array() || opts.empty())
            throw ValidationError(source + ": page " + std::to_string(i) +
                                  " needs at least one admissible link set");
        std::vector<std::vector<int>> parsed;
        for (const auto& opt : opts) {
            if (!opt.is_array() || opt.empty())
                throw ValidationError(source + ": page " + std::to_string(i) +
                                      ": link sets must be nonempty arrays");
            std::vector<int> set;
            for (const auto& t : opt) {
                const int v = t.get<int>();
                if (v < 0 || v >= n)
                    throw ValidationError(source + ": page " + std::to_string(i) +
                                          ": link target " + std::to_string(v) +
                                          " out of range");
                if (v == i)
                    throw ValidationError(source + ": page " + std::to_string(i) +
                                          ": loop link at vertex " + std::to_string(v) +
                                          " not allowed");
                if (std::find(set.begin(), set.end(), v) != set.end())
                    throw ValidationError(source + ": page " + std::to_string(i) +
                                          ": duplicate link target " + std::to_string(v));
                set.push_back(v);
            }
            std::sort(set.begin(), set.end());
            parsed.push_back(std::move(set));
        }
        spec.link_sets.push_back(std::move(parsed));
    }
    return spec;
}

Eigen::MatrixXd pagerank_profile(const PageRankSpec& spec, const std::vector<int>& choice) {
    const int n = static_cast<int>(spec.nu.size());
    if (static_cast<int>(choice.size()) != n)
        throw ValidationError("choice vector length does not match the page count");
    Eigen::MatrixXd pi(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& opts = spec.link_sets[static_cast<size_t>(i)];
        const int c = choice[static_cast<size_t>(i)];
        if (c < 0 || c >= static_cast<int>(opts.size()))
            throw ValidationError("page " + std::to_string(i) + ": option index " +
                                  std::to_string(c) + " out of range");
        const auto& set = opts[static_cast<size_t>(c)];
        for (int jdx = 0; jdx < n; ++jdx)
            pi(i, jdx) = spec.alpha * spec.nu[static_cast<size_t>(jdx)];
        const double share = (1.0 - spec.alpha) / static_cast<double>(set.size());
        for (int t : set) pi(i, t) += share;
    }
    return pi;
}

PageRankResult pagerank_equilibrium(const PageRankSpec& spec, long long cap) {
    const int n = static_cast<int>(spec.nu.size());
    long long total = 1;
    for (const auto& opts : spec.link_sets) {
        total *= static_cast<long long>(opts.size());
        if (total > cap)
            throw ValidationError("strategy space exceeds the cap " + std::to_string(cap));
    }
    PageRankResult res;
    res.choice.assign(static_cast<size_t>(n), 0);
    const auto own_rank = [&](const std::vector<int>& choice, int player) {
        return stationary_distribution(pagerank_profile(spec, choice))[static_cast<size_t>(player)];
    };
    // Round-robin best responses; teleportation keeps the chain irreducible, so the
    // stationary distribution is always well defined.
    const int round_cap = 4 * n + 64;
    bool quiet = false;
    while (!quiet) {
        if (res.rounds >= round_cap)
            throw InternalError("best-response rounds exceeded the sweep cap");
        quiet = true;
        ++res.rounds;
        for (int player = 0; player < n; ++player) {
            const int m = static_cast<int>(spec.link_sets[static_cast<size_t>(player)].size());
            int best = res.choice[static_cast<size_t>(player)];
            double best_val = own_rank(res.choice, player);
            std::vector<int> cand = res.choice;
            for (int opt = 0; opt < m; ++opt) {
                if (opt == res.choice[static_cast<size_t>(player)]) continue;
                cand[static_cast<size_t>(player)] = opt;
                const double v = own_rank(cand, player);
                if (v > best_val + 1e-12) {
                    best = opt;
                    best_val = v;
                }
            }
            if (best != res.choice[static_cast<size_t>(player)]) {
                res.choice[static_cast<size_t>(player)] = best;
                quiet = false;
            }
        }
    }
    // Re-certify the endpoint: no page may gain from any alternative subset.
    for (int player = 0; player < n; ++player) {
        const int m = static_cast<int>(spec.link_sets[static_cast<size_t>(player)].size());
        const double held = own_rank(res.choice, player);
        std::vector<int> cand = res.choice;
        for (int opt = 0; opt < m; ++opt) {
            if (opt == res.choice[static_cast<size_t>(player)]) continue;
            cand[static_cast<size_t>(player)] = opt;
            if (own_rank(cand, player) > held + 1e-9)
                throw InternalError("endpoint of the best-response sweep is not stable");
        }
    }
    res.rank = stationary_distribution(pagerank_profile(spec, res.choice));
    return res;
}

} // namespace buckpass
