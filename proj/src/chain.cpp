#include "buckpass/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "buckpass/json_io.hpp"

namespace buckpass {

namespace {

// Support digraph: entries > 0 exactly (inputs are taken as given; tolerances
// belong to derived quantities, not the model).
std::vector<std::vector<int>> support_adjacency(const Eigen::MatrixXd& pi) {
    const int n = static_cast<int>(pi.rows());
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (pi(i, j) > 0.0) adj[static_cast<size_t>(i)].push_back(j);
    return adj;
}

void check_square(const Eigen::MatrixXd& pi) {
    if (pi.rows() != pi.cols() || pi.rows() == 0)
        throw ValidationError("transition matrix must be square and nonempty");
}

} // namespace

StochasticProfile make_profile(const Graph& g, const Eigen::MatrixXd& pi,
                               const std::string& source) {
    if (pi.rows() != g.n || pi.cols() != g.n)
        throw ValidationError(source + ": matrix is " + std::to_string(pi.rows()) + "x" +
                              std::to_string(pi.cols()) + ", expected " + std::to_string(g.n) +
                              "x" + std::to_string(g.n));
    for (int i = 0; i < g.n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < g.n; ++j) {
            const double x = pi(i, j);
            if (!(x >= 0.0) || !std::isfinite(x))
                throw ValidationError(source + ": row " + std::to_string(i) +
                                      " has a negative or non-finite entry");
            if (i == j && x != 0.0)
                throw ValidationError(source + ": row " + std::to_string(i) +
                                      " has nonzero diagonal (self-transitions not allowed)");
            if (x > 0.0 && i != j && !g.has_edge(i, j))
                throw ValidationError(source + ": row " + std::to_string(i) + " puts mass on " +
                                      std::to_string(j) + ", which is not an out-neighbor");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError(source + ": row " + std::to_string(i) +
                                  " must sum to 1 within 1e-12");
    }
    return StochasticProfile{pi};
}

StochasticProfile parse_stochastic_profile(const std::string& text, const Graph& g,
                                           const std::string& source) {
    const nlohmann::json j = parse_json_text(text, source);
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(g.n, g.n);
    if (j.is_object() && j.contains("pi")) {
        const auto& rows = j.at("pi");
        if (!rows.is_array() || static_cast<int>(rows.size()) != g.n)
            throw ValidationError(source + ": field \"pi\" must be an array of " +
                                  std::to_string(g.n) + " rows");
        for (int i = 0; i < g.n; ++i) {
            const auto& row = rows[static_cast<size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != g.n)
                throw ValidationError(source + ": field \"pi\" row " + std::to_string(i) +
                                      " must have " + std::to_string(g.n) + " entries");
            for (int k = 0; k < g.n; ++k) {
                if (!row[static_cast<size_t>(k)].is_number())
                    throw ValidationError(source + ": field \"pi\" row " + std::to_string(i) +
                                          " has a non-numeric entry");
                pi(i, k) = row[static_cast<size_t>(k)].get<double>();
            }
        }
    } else if (j.is_object() && j.contains("rows")) {
        const auto& rows = j.at("rows");
        if (!rows.is_array())
            throw ValidationError(source + ": field \"rows\" must be an array");
        std::vector<char> seen(static_cast<size_t>(g.n), 0);
        for (const auto& r : rows) {
            if (!r.is_object() || !r.contains("i") || !r.contains("targets") || !r.contains("probs"))
                throw ValidationError(source +
                                      ": field \"rows\" entries need \"i\", \"targets\", \"probs\"");
            const int i = r.at("i").get<int>();
            if (i < 0 || i >= g.n)
                throw ValidationError(source + ": field \"rows\": vertex id " + std::to_string(i) +
                                      " out of range");
            if (seen[static_cast<size_t>(i)])
                throw ValidationError(source + ": field \"rows\": duplicate row for vertex " +
                                      std::to_string(i));
            seen[static_cast<size_t>(i)] = 1;
            const auto& tg = r.at("targets");
            const auto& pr = r.at("probs");
            if (!tg.is_array() || !pr.is_array() || tg.size() != pr.size())
                throw ValidationError(source + ": field \"rows\" for vertex " + std::to_string(i) +
                                      ": \"targets\" and \"probs\" must be arrays of equal length");
            for (size_t k = 0; k < tg.size(); ++k) {
                const int t = tg[k].get<int>();
                if (t < 0 || t >= g.n)
                    throw ValidationError(source + ": field \"rows\" for vertex " +
                                          std::to_string(i) + ": target out of range");
                pi(i, t) = pr[k].get<double>();
            }
        }
        for (int i = 0; i < g.n; ++i)
            if (!seen[static_cast<size_t>(i)])
                throw ValidationError(source + ": field \"rows\" is missing vertex " +
                                      std::to_string(i));
    } else {
        throw ValidationError(source + ": expected an object with field \"pi\" or \"rows\"");
    }
    return make_profile(g, pi, source);
}

Eigen::MatrixXd lift_profile(const Graph& g, const PureProfile& s) {
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(g.n, g.n);
    for (int i = 0; i < g.n; ++i) pi(i, s.s[static_cast<size_t>(i)]) = 1.0;
    return pi;
}

Eigen::MatrixXd absorption_probabilities(const Eigen::MatrixXd& pi,
                                         const std::vector<std::vector<int>>& classes) {
    check_square(pi);
    const int n = static_cast<int>(pi.rows());
    const int r = static_cast<int>(classes.size());
    std::vector<int> class_of(static_cast<size_t>(n), -1);
    for (int l = 0; l < r; ++l)
        for (int v : classes[static_cast<size_t>(l)]) class_of[static_cast<size_t>(v)] = l;
    std::vector<int> transient;
    for (int v = 0; v < n; ++v)
        if (class_of[static_cast<size_t>(v)] < 0) transient.push_back(v);

    Eigen::MatrixXd absorb = Eigen::MatrixXd::Zero(r, n);
    for (int v = 0; v < n; ++v)
        if (class_of[static_cast<size_t>(v)] >= 0) absorb(class_of[static_cast<size_t>(v)], v) = 1.0;

    const int t = static_cast<int>(transient.size());
    if (t == 0) return absorb;

    // (I - Q) x^l = b^l with Q the transient block and b^l the one-step mass
    // into class l; one LU factorization serves all classes.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(t, t);
    for (int a = 0; a < t; ++a)
        for (int b = 0; b < t; ++b)
            A(a, b) -= pi(transient[static_cast<size_t>(a)], transient[static_cast<size_t>(b)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    for (int l = 0; l < r; ++l) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(t);
        for (int a = 0; a < t; ++a)
            for (int v : classes[static_cast<size_t>(l)])
                b(a) += pi(transient[static_cast<size_t>(a)], v);
        const Eigen::VectorXd x = lu.solve(b);
        const double residual = (A * x - b).lpNorm<Eigen::Infinity>();
        if (!(residual < 1e-9))
            throw InternalError("absorption solve residual " + std::to_string(residual));
        for (int a = 0; a < t; ++a) absorb(l, transient[static_cast<size_t>(a)]) = x(a);
    }
    return absorb;
}

RecurrentStructure recurrent_structure(const Eigen::MatrixXd& pi, const InitialMeasure& mu) {
    check_square(pi);
    const int n = static_cast<int>(pi.rows());
    validate_measure(mu, n, "mu");

    const SccResult scc = strongly_connected_components(support_adjacency(pi));
    std::vector<char> has_out(scc.components.size(), 0);
    for (const auto& [a, b] : scc.condensation_edges) has_out[static_cast<size_t>(a)] = 1;

    RecurrentStructure rs;
    for (size_t c = 0; c < scc.components.size(); ++c)
        if (!has_out[c]) rs.classes.push_back(scc.components[c]);
    std::sort(rs.classes.begin(), rs.classes.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    rs.absorb = absorption_probabilities(pi, rs.classes);
    const int r = static_cast<int>(rs.classes.size());
    rs.closures.resize(static_cast<size_t>(r));
    for (int j = 0; j < n; ++j) {
        double best = 0.0;
        for (int l = 0; l < r; ++l) {
            if (rs.absorb(l, j) >= 1.0 - 1e-9) rs.closures[static_cast<size_t>(l)].push_back(j);
            best = std::max(best, rs.absorb(l, j));
        }
        if (best < 1.0 - 1e-9) rs.residual.push_back(j);
    }
    rs.class_mass.assign(static_cast<size_t>(r), 0.0);
    for (int l = 0; l < r; ++l)
        for (int j = 0; j < n; ++j)
            rs.class_mass[static_cast<size_t>(l)] += mu.mu[static_cast<size_t>(j)] * rs.absorb(l, j);
    return rs;
}

Eigen::MatrixXd restrict_matrix(const Eigen::MatrixXd& pi, const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            sub(a, b) = pi(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
    return sub;
}

std::vector<double> stationary_distribution(const Eigen::MatrixXd& pi) {
    check_square(pi);
    const int n = static_cast<int>(pi.rows());
    if (strongly_connected_components(support_adjacency(pi)).components.size() != 1)
        throw ValidationError("stationary distribution needs an irreducible restriction");

    // rho (pi - I) = 0 with the last balance equation replaced by normalization.
    Eigen::MatrixXd A = pi.transpose() - Eigen::MatrixXd::Identity(n, n);
    for (int j = 0; j < n; ++j) A(n - 1, j) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    const Eigen::VectorXd rho = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(b);

    const double residual = (rho.transpose() * pi - rho.transpose()).lpNorm<Eigen::Infinity>();
    if (!(residual < 1e-10))
        throw InternalError("stationary solve residual " + std::to_string(residual));
    return {rho.data(), rho.data() + n};
}

std::vector<double> expected_hitting_times(const Eigen::MatrixXd& pi, int target) {
    check_square(pi);
    const int n = static_cast<int>(pi.rows());
    if (target < 0 || target >= n)
        throw ValidationError("hitting-time target out of range");

    // Scope: vertices from which the chain reaches the target with certainty.
    // Making the target absorbing turns that into an absorption probability.
    Eigen::MatrixXd abs_pi = pi;
    abs_pi.row(target).setZero();
    abs_pi(target, target) = 1.0;
    const RecurrentStructure rs = recurrent_structure(abs_pi, InitialMeasure::degenerate(n, target));
    int tclass = -1;
    for (size_t l = 0; l < rs.classes.size(); ++l)
        if (rs.classes[l] == std::vector<int>{target}) tclass = static_cast<int>(l);
    if (tclass < 0)
        throw InternalError("absorbing target lost its own class");

    std::vector<int> scope; // excluding the target
    for (int j = 0; j < n; ++j)
        if (j != target && rs.absorb(tclass, j) >= 1.0 - 1e-9) scope.push_back(j);

    // h_j = 1 + sum_k pi_jk h_k over the scope, h_target = 0.
    const int t = static_cast<int>(scope.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(t, t);
    for (int a = 0; a < t; ++a)
        for (int b = 0; b < t; ++b)
            A(a, b) -= pi(scope[static_cast<size_t>(a)], scope[static_cast<size_t>(b)]);
    const Eigen::VectorXd h =
        Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(Eigen::VectorXd::Ones(t));

    std::vector<double> out(static_cast<size_t>(n), std::numeric_limits<double>::quiet_NaN());
    for (int a = 0; a < t; ++a) out[static_cast<size_t>(scope[a])] = h(a);

    // First return at the target: every successor must sit in the scope.
    double ret = 1.0;
    for (int k = 0; k < n; ++k) {
        if (pi(target, k) == 0.0 || k == target) continue;
        const double hk = out[static_cast<size_t>(k)];
        if (std::isnan(hk))
            throw ValidationError("return to target " + std::to_string(target) +
                                  " is not certain; hitting times undefined");
        ret += pi(target, k) * hk;
    }
    out[static_cast<size_t>(target)] = ret;
    return out;
}

} // namespace buckpass
