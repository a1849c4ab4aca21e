#include "buckpass/fairness.hpp"

#include <algorithm>
#include <cmath>

#include "buckpass/chain.hpp"
#include "buckpass/json_io.hpp"
#include "buckpass/stoch_game.hpp"

namespace buckpass {

double social_cost(const CostVector& c) {
    double m = 0.0;
    for (double x : c.c) m = std::max(m, x);
    return m;
}

Rat social_cost_rat(const DetCostVector& c) {
    Rat m(0);
    for (const auto& x : c.c)
        if (x > m) m = x;
    return m;
}

FairnessReportDet fairness_report_det(const Graph& g, const InitialMeasure& mu, long long cap) {
    long long total = 1;
    for (const auto& lst : g.out) {
        total *= static_cast<long long>(lst.size());
        if (total > cap)
            throw ValidationError("profile space exceeds the fairness cap " + std::to_string(cap));
    }
    FairnessReportDet rep;
    bool first = true, first_ne = true;
    std::vector<size_t> idx(static_cast<size_t>(g.n), 0);
    while (true) {
        PureProfile s;
        s.s.reserve(static_cast<size_t>(g.n));
        for (int i = 0; i < g.n; ++i)
            s.s.push_back(g.out[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]]);
        const Rat sc = social_cost_rat(det_cost_vector(g, mu, s));
        if (first || sc < rep.min_sc) {
            rep.min_sc = sc;
            rep.min_witness = s;
        }
        first = false;
        bool ne = true;
        for (int player = 0; player < g.n && ne; ++player)
            ne = det_profitable_deviations(g, mu, s, player).empty();
        if (ne) {
            ++rep.ne_count;
            if (first_ne || sc > rep.worst_ne_sc) {
                rep.worst_ne_sc = sc;
                rep.worst_ne_witness = s;
            }
            if (first_ne || sc < rep.best_ne_sc) {
                rep.best_ne_sc = sc;
                rep.best_ne_witness = s;
            }
            first_ne = false;
        }
        int i = g.n - 1;
        while (i >= 0 && ++idx[static_cast<size_t>(i)] == g.out[static_cast<size_t>(i)].size()) {
            idx[static_cast<size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    if (rep.ne_count == 0)
        throw InternalError("no pure equilibrium found; the potential argument guarantees one");
    if (rep.min_sc == 0)
        throw InternalError("minimal social cost of zero contradicts the 1/n lower bound");
    rep.poa = rep.worst_ne_sc / rep.min_sc;
    rep.pos = rep.best_ne_sc / rep.min_sc;
    return rep;
}

namespace {

// Linear expressions in the declared parameters: number | param | number'*'param,
// combined with '+'/'-'. Covers the families used in practice ("p", "1-p", ...).
ParamFamily::Entry parse_expr(const nlohmann::json& x, int target,
                              const std::vector<std::string>& params,
                              const std::string& where) {
    ParamFamily::Entry e;
    e.target = target;
    if (x.is_number()) {
        e.constant = x.get<double>();
        return e;
    }
    if (!x.is_string())
        throw ValidationError(where + ": entries must be numbers or expression strings");
    const std::string s = x.get<std::string>();
    size_t pos = 0;
    double sign = 1.0;
    bool expect_term = true;
    const auto is_param = [&](const std::string& name) {
        return std::find(params.begin(), params.end(), name) != params.end();
    };
    while (pos < s.size()) {
        const char c = s[pos];
        if (c == ' ') { ++pos; continue; }
        if (!expect_term && (c == '+' || c == '-')) {
            sign = (c == '-') ? -1.0 : 1.0;
            expect_term = true;
            ++pos;
            continue;
        }
        if (!expect_term)
            throw ValidationError(where + ": malformed expression \"" + s + "\"");
        // term: either a number (optionally '*param') or a bare parameter name
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
            ((c == '-' || c == '+') && expect_term)) {
            size_t used = 0;
            double v;
            try {
                v = std::stod(s.substr(pos), &used);
            } catch (const std::exception&) {
                throw ValidationError(where + ": malformed number in \"" + s + "\"");
            }
            pos += used;
            while (pos < s.size() && s[pos] == ' ') ++pos;
            if (pos < s.size() && s[pos] == '*') {
                ++pos;
                while (pos < s.size() && s[pos] == ' ') ++pos;
                size_t end = pos;
                while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) ||
                                          s[end] == '_'))
                    ++end;
                const std::string name = s.substr(pos, end - pos);
                if (!is_param(name))
                    throw ValidationError(where + ": unknown parameter \"" + name + "\"");
                e.coef[name] += sign * v;
                pos = end;
            } else {
                e.constant += sign * v;
            }
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t end = pos;
            while (end < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
                ++end;
            const std::string name = s.substr(pos, end - pos);
            if (!is_param(name))
                throw ValidationError(where + ": unknown parameter \"" + name + "\"");
            e.coef[name] += sign;
            pos = end;
        } else {
            throw ValidationError(where + ": malformed expression \"" + s + "\"");
        }
        sign = 1.0;
        expect_term = false;
    }
    if (expect_term)
        throw ValidationError(where + ": malformed expression \"" + s + "\"");
    return e;
}

} // namespace

ParamFamily parse_param_family(const std::string& text, const Graph& g,
                               const std::string& source) {
    const nlohmann::json j = parse_json_text(text, source);
    if (!j.is_object() || !j.contains("rows") || !j.at("rows").is_array())
        throw ValidationError(source + ": expected an object with \"rows\" (and \"params\")");
    ParamFamily fam;
    if (j.contains("params")) {
        if (!j.at("params").is_array())
            throw ValidationError(source + ": field \"params\" must be an array of names");
        for (const auto& p : j.at("params")) {
            if (!p.is_string())
                throw ValidationError(source + ": field \"params\" must be an array of names");
            fam.params.push_back(p.get<std::string>());
        }
    }
    fam.rows.resize(static_cast<size_t>(g.n));
    std::vector<char> seen(static_cast<size_t>(g.n), 0);
    for (const auto& r : j.at("rows")) {
        if (!r.is_object() || !r.contains("i") || !r.contains("targets") || !r.contains("probs"))
            throw ValidationError(source + ": \"rows\" entries need \"i\", \"targets\", \"probs\"");
        const int i = r.at("i").get<int>();
        if (i < 0 || i >= g.n)
            throw ValidationError(source + ": vertex id " + std::to_string(i) + " out of range");
        if (seen[static_cast<size_t>(i)])
            throw ValidationError(source + ": duplicate row for vertex " + std::to_string(i));
        seen[static_cast<size_t>(i)] = 1;
        const auto& tg = r.at("targets");
        const auto& pr = r.at("probs");
        if (!tg.is_array() || !pr.is_array() || tg.size() != pr.size())
            throw ValidationError(source + ": vertex " + std::to_string(i) +
                                  ": \"targets\" and \"probs\" must be arrays of equal length");
        const std::string where = source + ": vertex " + std::to_string(i);
        for (size_t k = 0; k < tg.size(); ++k) {
            const int t = tg[k].get<int>();
            if (t < 0 || t >= g.n || t == i || !g.has_edge(i, t))
                throw ValidationError(where + ": target " + std::to_string(t) +
                                      " is not an out-neighbor");
            fam.rows[static_cast<size_t>(i)].push_back(parse_expr(pr[k], t, fam.params, where));
        }
    }
    for (int i = 0; i < g.n; ++i)
        if (!seen[static_cast<size_t>(i)])
            throw ValidationError(source + ": missing row for vertex " + std::to_string(i));
    return fam;
}

Eigen::MatrixXd family_profile(const Graph& g, const ParamFamily& fam,
                               const std::vector<double>& theta, const std::string& source) {
    if (theta.size() != fam.params.size())
        throw ValidationError(source + ": expected " + std::to_string(fam.params.size()) +
                              " parameter values, got " + std::to_string(theta.size()));
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(g.n, g.n);
    for (int i = 0; i < g.n; ++i)
        for (const auto& e : fam.rows[static_cast<size_t>(i)]) {
            double v = e.constant;
            for (const auto& [name, coef] : e.coef) {
                const size_t k = static_cast<size_t>(
                    std::find(fam.params.begin(), fam.params.end(), name) - fam.params.begin());
                v += coef * theta[k];
            }
            if (v < 0.0 && v > -1e-12) v = 0.0;
            if (v < 0.0)
                throw ValidationError(source + ": vertex " + std::to_string(i) +
                                      " gets a negative probability at this parameter point");
            pi(i, e.target) += v;
        }
    return make_profile(g, pi, source).pi;
}

FairnessReportParam fairness_report_param(const Graph& g, const InitialMeasure& mu,
                                          const ParamFamily& fam, int refine_rounds,
                                          double grid_step, double dev_grid_step) {
    const size_t k = fam.params.size();
    FairnessReportParam rep;
    rep.grid_step = grid_step;
    rep.dev_grid_step = dev_grid_step;
    rep.refine_rounds = refine_rounds;

    const auto sc_of = [&](const std::vector<double>& theta) {
        return social_cost(stoch_cost_vector(g, mu, family_profile(g, fam, theta)).costs);
    };
    const auto is_ne = [&](const std::vector<double>& theta) {
        return no_profitable_stoch_deviation(g, mu, family_profile(g, fam, theta), dev_grid_step);
    };

    bool first = true, first_ne = true;
    std::vector<double> theta(k, 0.0);
    const int ticks = k == 0 ? 0 : static_cast<int>(std::lround(1.0 / grid_step));
    std::vector<int> pos(k, 0);
    while (true) {
        for (size_t d = 0; d < k; ++d) theta[d] = static_cast<double>(pos[d]) * grid_step;
        const double sc = sc_of(theta);
        if (first || sc < rep.min_sc) {
            rep.min_sc = sc;
            rep.min_theta = theta;
        }
        first = false;
        if (is_ne(theta)) {
            ++rep.ne_grid_points;
            if (first_ne || sc > rep.worst_ne_sc) {
                rep.worst_ne_sc = sc;
                rep.worst_ne_theta = theta;
            }
            if (first_ne || sc < rep.best_ne_sc) {
                rep.best_ne_sc = sc;
                rep.best_ne_theta = theta;
            }
            first_ne = false;
        }
        if (k == 0) break;
        size_t d = k;
        while (d > 0 && ++pos[d - 1] > ticks) {
            pos[d - 1] = 0;
            --d;
        }
        if (d == 0) break;
    }
    if (first_ne)
        throw ValidationError("no equilibrium found on the family grid; refine the grid");

    // Local bisection around the three optima: halve the step, probe the +/- step
    // neighborhood componentwise, keep improvements (NE slots stay NE-certified).
    const auto refine = [&](std::vector<double>& best_theta, double& best_val, bool maximize,
                            bool need_ne) {
        if (k == 0) return;
        double h = grid_step;
        for (int round = 0; round < refine_rounds; ++round) {
            h /= 2.0;
            bool moved = true;
            while (moved) {
                moved = false;
                for (size_t d = 0; d < k; ++d)
                    for (double dir : {-1.0, 1.0}) {
                        std::vector<double> cand = best_theta;
                        cand[d] += dir * h;
                        if (cand[d] < 0.0 || cand[d] > 1.0) continue;
                        const double v = sc_of(cand);
                        const bool better = maximize ? v > best_val : v < best_val;
                        if (better && (!need_ne || is_ne(cand))) {
                            best_theta = cand;
                            best_val = v;
                            moved = true;
                        }
                    }
            }
        }
    };
    refine(rep.min_theta, rep.min_sc, false, false);
    refine(rep.best_ne_theta, rep.best_ne_sc, false, true);
    refine(rep.worst_ne_theta, rep.worst_ne_sc, true, true);

    rep.poa = rep.worst_ne_sc / rep.min_sc;
    rep.pos = rep.best_ne_sc / rep.min_sc;
    return rep;
}

namespace {

void cycle_dfs(const Graph& g, const std::vector<char>& allowed, int start, int v,
               std::vector<char>& on_path, int depth, int& best) {
    for (int w : g.out[static_cast<size_t>(v)]) {
        if (!allowed[static_cast<size_t>(w)]) continue;
        if (w == start) {
            best = std::max(best, depth + 1);
            continue;
        }
        if (w < start || on_path[static_cast<size_t>(w)]) continue; // canonical: smallest first
        on_path[static_cast<size_t>(w)] = 1;
        cycle_dfs(g, allowed, start, w, on_path, depth + 1, best);
        on_path[static_cast<size_t>(w)] = 0;
    }
}

} // namespace

int longest_cycle_length(const Graph& g, const std::vector<int>& vertices, int cap) {
    if (static_cast<int>(vertices.size()) > cap)
        throw ValidationError("longest-cycle search capped at " + std::to_string(cap) +
                              " vertices");
    std::vector<char> allowed(static_cast<size_t>(g.n), 0);
    for (int v : vertices) allowed[static_cast<size_t>(v)] = 1;
    int best = 0;
    std::vector<char> on_path(static_cast<size_t>(g.n), 0);
    for (int start : vertices) {
        on_path[static_cast<size_t>(start)] = 1;
        cycle_dfs(g, allowed, start, start, on_path, 0, best);
        on_path[static_cast<size_t>(start)] = 0;
    }
    return best;
}

} // namespace buckpass
