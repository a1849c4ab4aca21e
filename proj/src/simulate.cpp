#include "buckpass/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "buckpass/chain.hpp"
#include "buckpass/errors.hpp"
#include "buckpass/philox.hpp"

namespace buckpass {

namespace {

void check_sim_inputs(const Graph& g, const Eigen::MatrixXd& pi, const SimConfig& cfg) {
    if (pi.rows() != g.n || pi.cols() != g.n)
        throw ValidationError("simulator: transition matrix shape does not match the graph");
    for (int i = 0; i < g.n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < g.n; ++j) {
            if (pi(i, j) < 0.0 || !std::isfinite(pi(i, j)))
                throw ValidationError("simulator: row " + std::to_string(i) +
                                      " has a negative or non-finite entry");
            sum += pi(i, j);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError("simulator: row " + std::to_string(i) + " must sum to 1");
    }
    if (cfg.T < 1) throw ValidationError("simulator: horizon T must be at least 1");
    if (cfg.replicas < 1) throw ValidationError("simulator: need at least one replica");
}

// Inverse-CDF walk: cumulate probabilities in column order, take the first index
// whose running sum exceeds the uniform draw. One draw per step keeps replicas
// and raw trajectories on identical generator streams.
int sample_index(const double* w, int n, Philox& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    int last_pos = 0;
    for (int j = 0; j < n; ++j) {
        if (w[j] <= 0.0) continue;
        cum += w[j];
        last_pos = j;
        if (u < cum) return j;
    }
    return last_pos; // u landed in the rounding sliver past the final cumulant
}

} // namespace

SimResult simulate(const Graph& g, const InitialMeasure& mu, const Eigen::MatrixXd& pi,
                   const SimConfig& cfg) {
    check_sim_inputs(g, pi, cfg);
    const int n = g.n;
    // Row-major copies so sample_index can walk contiguous memory.
    std::vector<double> rows(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rows[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] =
                pi(i, j);
    std::vector<std::vector<double>> freqs;
    freqs.reserve(static_cast<size_t>(cfg.replicas));
    for (int r = 0; r < cfg.replicas; ++r) {
        Philox rng(cfg.seed, static_cast<uint32_t>(r));
        int x = sample_index(mu.mu.data(), n, rng);
        std::vector<long long> counts(static_cast<size_t>(n), 0);
        for (long long t = 1; t <= cfg.T; ++t) {
            x = sample_index(&rows[static_cast<size_t>(x) * static_cast<size_t>(n)], n, rng);
            ++counts[static_cast<size_t>(x)];
        }
        std::vector<double> f(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            f[static_cast<size_t>(i)] =
                static_cast<double>(counts[static_cast<size_t>(i)]) /
                static_cast<double>(cfg.T);
        freqs.push_back(std::move(f));
    }
    SimResult res;
    res.empirical.assign(static_cast<size_t>(n), 0.0);
    res.std_error.assign(static_cast<size_t>(n), 0.0);
    for (const auto& f : freqs)
        for (int i = 0; i < n; ++i) res.empirical[static_cast<size_t>(i)] += f[static_cast<size_t>(i)];
    for (double& e : res.empirical) e /= static_cast<double>(cfg.replicas);
    if (cfg.replicas > 1) {
        for (int i = 0; i < n; ++i) {
            double ss = 0.0;
            for (const auto& f : freqs) {
                const double d = f[static_cast<size_t>(i)] - res.empirical[static_cast<size_t>(i)];
                ss += d * d;
            }
            res.std_error[static_cast<size_t>(i)] =
                std::sqrt(ss / static_cast<double>(cfg.replicas - 1)) /
                std::sqrt(static_cast<double>(cfg.replicas));
        }
    }
    return res;
}

SimResult simulate(const Graph& g, const InitialMeasure& mu, const PureProfile& s,
                   const SimConfig& cfg) {
    return simulate(g, mu, lift_profile(g, s), cfg);
}

std::vector<int> simulate_trajectory(const Graph& g, const InitialMeasure& mu,
                                     const Eigen::MatrixXd& pi, long long T, uint64_t seed,
                                     uint32_t replica) {
    SimConfig cfg;
    cfg.T = T;
    cfg.seed = seed;
    check_sim_inputs(g, pi, cfg);
    const int n = g.n;
    std::vector<double> rows(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rows[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] =
                pi(i, j);
    Philox rng(seed, replica);
    std::vector<int> path;
    path.reserve(static_cast<size_t>(T) + 1);
    int x = sample_index(mu.mu.data(), n, rng);
    path.push_back(x);
    for (long long t = 1; t <= T; ++t) {
        x = sample_index(&rows[static_cast<size_t>(x) * static_cast<size_t>(n)], n, rng);
        path.push_back(x);
    }
    return path;
}

MixedExtensionReport mixed_extension_check(const Graph& g, const InitialMeasure& mu) {
    const auto sorted_out = [&](int v) {
        std::vector<int> o = g.out[static_cast<size_t>(v)];
        std::sort(o.begin(), o.end());
        return o;
    };
    if (g.n != 3 || sorted_out(0) != std::vector<int>{1, 2} ||
        sorted_out(1) != std::vector<int>{0} || sorted_out(2) != std::vector<int>{1})
        throw ValidationError(
            "mixed-extension check is defined for the three-vertex instance where only "
            "vertex 0 has a choice (0->{1,2}, 1->0, 2->1)");
    Rat musum(0);
    for (double x : mu.mu) musum += rat_from_double(x);
    if (musum == 0) throw ValidationError("measure must have positive total mass");

    MixedExtensionReport rep;
    // Mixed extension: average the two deterministic outcomes of vertex 0's coin.
    PureProfile a, b;
    a.s = {1, 0, 1};
    b.s = {2, 0, 1};
    const Rat ca = det_cost_vector(g, mu, a).c[0];
    const Rat cb = det_cost_vector(g, mu, b).c[0];
    rep.mixed_cost_player0 = (ca + cb) / (2 * musum); // normalize away measure rounding

    // Stochastic game: exact tree volumes for the half/half row at vertex 0.
    std::vector<std::vector<Rat>> w(3, std::vector<Rat>(3, Rat(0)));
    w[0][1] = Rat(1, 2);
    w[0][2] = Rat(1, 2);
    w[1][0] = Rat(1);
    w[2][1] = Rat(1);
    const std::vector<int> verts{0, 1, 2};
    const auto support = [&](int x, int y) { return w[static_cast<size_t>(x)][static_cast<size_t>(y)] != 0; };
    std::vector<Rat> omega(3, Rat(0));
    Rat omega_v(0);
    for (int root = 0; root < 3; ++root) {
        for (const auto& tree : enumerate_rooted_trees(verts, root, support)) {
            Rat prod(1);
            for (const auto& [x, y] : tree) prod *= w[static_cast<size_t>(x)][static_cast<size_t>(y)];
            omega[static_cast<size_t>(root)] += prod;
        }
        omega_v += omega[static_cast<size_t>(root)];
    }
    if (omega_v == 0) throw InternalError("tree volumes vanished on an irreducible chain");
    // The closure is the whole vertex set, so the holding share is the stationary
    // mass itself (total measure normalizes to 1).
    rep.stoch_cost_player0 = omega[0] / omega_v;
    rep.difference = rep.mixed_cost_player0 - rep.stoch_cost_player0;
    if (!(rep.difference > 0))
        throw InternalError("mixed extension failed to exceed the stochastic cost");
    return rep;
}

} // namespace buckpass
