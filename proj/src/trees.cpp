#include "buckpass/trees.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "buckpass/chain.hpp"

namespace buckpass {

namespace {

// Closed within solver tolerance and exactly one sink SCC on the support.
void check_single_class_closure(const Eigen::MatrixXd& pi, const std::vector<int>& closure) {
    const int n = static_cast<int>(pi.rows());
    std::vector<char> in(static_cast<size_t>(n), 0);
    for (int v : closure) {
        if (v < 0 || v >= n) throw ValidationError("closure vertex out of range");
        if (in[static_cast<size_t>(v)]) throw ValidationError("closure has duplicate vertices");
        in[static_cast<size_t>(v)] = 1;
    }
    for (int v : closure) {
        double inside = 0.0;
        for (int j = 0; j < n; ++j)
            if (in[static_cast<size_t>(j)]) inside += pi(v, j);
        if (inside < 1.0 - 1e-9)
            throw ValidationError("vertex " + std::to_string(v) +
                                  " leaks probability out of the closure");
    }
    const Eigen::MatrixXd sub = restrict_matrix(pi, closure);
    const int k = static_cast<int>(closure.size());
    std::vector<std::vector<int>> adj(static_cast<size_t>(k));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            if (sub(a, b) > 0.0) adj[static_cast<size_t>(a)].push_back(b);
    const SccResult scc = strongly_connected_components(adj);
    std::vector<char> has_out(scc.components.size(), 0);
    for (const auto& [a, b] : scc.condensation_edges) has_out[static_cast<size_t>(a)] = 1;
    int sinks = 0;
    for (char h : has_out)
        if (!h) ++sinks;
    if (sinks != 1)
        throw ValidationError("closure restriction has " + std::to_string(sinks) +
                              " recurrent classes, expected exactly 1");
}

double minor_determinant(const Eigen::MatrixXd& L, int drop) {
    const int k = static_cast<int>(L.rows());
    if (k == 1) return 1.0; // empty minor: the empty product
    Eigen::MatrixXd m(k - 1, k - 1);
    for (int a = 0, ra = 0; a < k; ++a) {
        if (a == drop) continue;
        for (int b = 0, cb = 0; b < k; ++b) {
            if (b == drop) continue;
            m(ra, cb) = L(a, b);
            ++cb;
        }
        ++ra;
    }
    return m.determinant();
}

} // namespace

double edge_set_weight(const Eigen::MatrixXd& pi, const std::vector<std::pair<int, int>>& edges) {
    double w = 1.0;
    for (const auto& [i, j] : edges) w *= pi(i, j);
    return w;
}

TreeVolumes tree_volumes(const Eigen::MatrixXd& pi, const std::vector<int>& closure,
                         int enum_cap) {
    check_single_class_closure(pi, closure);
    const int k = static_cast<int>(closure.size());
    const Eigen::MatrixXd sub = restrict_matrix(pi, closure);
    const Eigen::MatrixXd L = Eigen::MatrixXd::Identity(k, k) - sub;

    TreeVolumes tv;
    tv.omega.resize(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) tv.omega[static_cast<size_t>(i)] = minor_determinant(L, i);

    if (k <= enum_cap) {
        // Spanning trees of the complete graph on the closure, zero-weight edges
        // pruned (they contribute nothing to the sums).
        tv.omega_enum.resize(static_cast<size_t>(k));
        std::vector<int> local(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) local[static_cast<size_t>(i)] = i;
        const auto support = [&](int a, int b) { return sub(a, b) > 0.0; };
        for (int i = 0; i < k; ++i) {
            double total = 0.0;
            for (const auto& tree : enumerate_rooted_trees(local, i, support, enum_cap))
                total += edge_set_weight(sub, tree);
            tv.omega_enum[static_cast<size_t>(i)] = total;
        }
        for (int i = 0; i < k; ++i) {
            const double a = tv.omega[static_cast<size_t>(i)];
            const double b = tv.omega_enum[static_cast<size_t>(i)];
            if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)))
                throw InternalError("tree-volume routes disagree at closure index " +
                                    std::to_string(i) + ": determinant " + std::to_string(a) +
                                    " vs enumeration " + std::to_string(b));
        }
        tv.method = "enumeration+determinant";
    } else {
        tv.method = "determinant";
    }
    tv.omega_V = 0.0;
    for (double w : tv.omega) tv.omega_V += w;
    return tv;
}

std::vector<double> stationary_via_trees(const Eigen::MatrixXd& pi,
                                         const std::vector<int>& closure) {
    const TreeVolumes tv = tree_volumes(pi, closure);
    std::vector<double> rho(tv.omega.size());
    for (size_t i = 0; i < rho.size(); ++i) {
        rho[i] = tv.omega[i] / tv.omega_V;
        if (rho[i] < 0.0 && rho[i] > -1e-12) rho[i] = 0.0; // determinant noise on transients
    }
    return rho;
}

double omega_spectral(const Eigen::MatrixXd& pi, const std::vector<int>& closure) {
    check_single_class_closure(pi, closure);
    const int k = static_cast<int>(closure.size());
    const Eigen::MatrixXd L =
        Eigen::MatrixXd::Identity(k, k) - restrict_matrix(pi, closure);
    const Eigen::EigenSolver<Eigen::MatrixXd> es(L);
    if (es.info() != Eigen::Success)
        throw InternalError("eigenvalue computation failed on the closure Laplacian");

    // Exactly one eigenvalue vanishes on a single-class closure; drop the one of
    // smallest modulus and flag a second near-zero as a multi-class signal.
    const auto& ev = es.eigenvalues();
    int zero_at = 0;
    for (int i = 1; i < k; ++i)
        if (std::abs(ev(i)) < std::abs(ev(zero_at))) zero_at = i;
    std::complex<double> prod(1.0, 0.0);
    for (int i = 0; i < k; ++i) {
        if (i == zero_at) continue;
        if (std::abs(ev(i)) < 1e-9)
            throw ValidationError("two eigenvalues below 1e-9: closure holds more than one class");
        prod *= ev(i);
    }
    if (std::abs(prod.imag()) > 1e-7 * std::abs(prod))
        throw InternalError("nonzero-eigenvalue product has imaginary residue " +
                            std::to_string(prod.imag()));
    return prod.real();
}

Eigen::MatrixXd adjugate(const Eigen::MatrixXd& m) {
    const int k = static_cast<int>(m.rows());
    if (k != m.cols())
        throw ValidationError("adjugate needs a square matrix");
    if (k > 12)
        throw ValidationError("adjugate via cofactors capped at 12x12, got " + std::to_string(k));
    Eigen::MatrixXd adj(k, k);
    Eigen::MatrixXd minor(k - 1 > 0 ? k - 1 : 1, k - 1 > 0 ? k - 1 : 1);
    if (k == 1) {
        adj(0, 0) = 1.0;
        return adj;
    }
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            for (int r = 0, rr = 0; r < k; ++r) {
                if (r == a) continue;
                for (int c = 0, cc = 0; c < k; ++c) {
                    if (c == b) continue;
                    minor(rr, cc) = m(r, c);
                    ++cc;
                }
                ++rr;
            }
            const double cof = (((a + b) % 2) ? -1.0 : 1.0) * minor.determinant();
            adj(b, a) = cof; // adj = transpose of the cofactor matrix
        }
    return adj;
}

double expected_cycle_length(const Eigen::MatrixXd& pi, const std::vector<int>& closure) {
    check_single_class_closure(pi, closure);
    const int k = static_cast<int>(closure.size());
    if (k > 10)
        throw ValidationError("expected cycle length is exhaustive; capped at 10 vertices, got " +
                              std::to_string(k));
    const Eigen::MatrixXd sub = restrict_matrix(pi, closure);

    std::vector<std::vector<int>> succ(static_cast<size_t>(k));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            if (sub(a, b) > 0.0) succ[static_cast<size_t>(a)].push_back(b);

    // Walk every pure profile on the support; Lambda is the cycle length when the
    // profile is one spanning unicycle of the closure, zero otherwise.
    std::vector<int> pick(static_cast<size_t>(k), 0);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (int a = 0; a < k; ++a) w *= sub(a, succ[static_cast<size_t>(a)][pick[static_cast<size_t>(a)]]);
        if (w > 0.0) {
            // Functional graph: count components/cycle by pointer chasing.
            std::vector<int> state(static_cast<size_t>(k), 0);
            int cycles = 0, cycle_len = 0;
            for (int v0 = 0; v0 < k; ++v0) {
                if (state[static_cast<size_t>(v0)]) continue;
                std::vector<int> walk;
                int v = v0;
                while (state[static_cast<size_t>(v)] == 0) {
                    state[static_cast<size_t>(v)] = 1;
                    walk.push_back(v);
                    v = succ[static_cast<size_t>(v)][pick[static_cast<size_t>(v)]];
                }
                if (state[static_cast<size_t>(v)] == 1) {
                    ++cycles;
                    int len = 0;
                    bool counting = false;
                    for (int u : walk) {
                        if (u == v) counting = true;
                        if (counting) ++len;
                    }
                    cycle_len = len;
                }
                for (int u : walk) state[static_cast<size_t>(u)] = 2;
            }
            if (cycles == 1) total += w * cycle_len;
        }
        int i = k - 1;
        while (i >= 0 && ++pick[static_cast<size_t>(i)] ==
                             static_cast<int>(succ[static_cast<size_t>(i)].size())) {
            pick[static_cast<size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return total;
}

} // namespace buckpass
