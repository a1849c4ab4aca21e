#include "buckpass/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ostream>
#include <sstream>

#include "buckpass/chain.hpp"
#include "buckpass/det_game.hpp"
#include "buckpass/errors.hpp"
#include "buckpass/fairness.hpp"
#include "buckpass/graph.hpp"
#include "buckpass/holding.hpp"
#include "buckpass/json_io.hpp"
#include "buckpass/simulate.hpp"
#include "buckpass/stoch_game.hpp"
#include "buckpass/trees.hpp"

namespace buckpass {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct LoadedGraph {
    Graph g;
    InitialMeasure mu;
};

LoadedGraph load_graph(const std::string& path) {
    auto [g, mu] = parse_graph(slurp(path), path);
    LoadedGraph lg{std::move(g), mu ? *mu : InitialMeasure::uniform(0)};
    if (!mu) lg.mu = InitialMeasure::uniform(lg.g.n);
    return lg;
}

nlohmann::json int_array(const std::vector<int>& v) {
    return nlohmann::json(v);
}

nlohmann::json rat_array(const std::vector<Rat>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : v) a.push_back(rat_to_string(r));
    return a;
}

nlohmann::json double_array(const std::vector<double>& v) {
    return nlohmann::json(v);
}

nlohmann::json pure_step_json(const ImprovementStep& st) {
    nlohmann::json j;
    j["player"] = st.dev.player;
    j["new_target"] = st.dev.new_target;
    j["kind"] = dev_kind_name(st.dev.kind);
    j["improvement"] = rat_to_string(st.dev.improvement);
    return j;
}

// Human-readable rendering of the same report: one "key: value" line per scalar,
// nested objects indented, arrays inline.
void render_text(const nlohmann::json& j, std::ostream& out, int depth) {
    const std::string pad(static_cast<size_t>(depth) * 2, ' ');
    for (const auto& [key, val] : j.items()) {
        if (val.is_object()) {
            out << pad << key << ":\n";
            render_text(val, out, depth + 1);
        } else {
            out << pad << key << ": " << dump_deterministic(val) << "\n";
        }
    }
}

void emit(const nlohmann::json& j, const std::string& format, std::ostream& out) {
    if (format == "text")
        render_text(j, out, 0);
    else
        out << dump_deterministic(j, 2) << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Buck-passing and buck-holding games on directed graphs"};
    app.require_subcommand(1);

    std::string format = "json";
    uint64_t seed = 0;
    long long cap = 1000000;
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_option("--seed", seed, "Random seed for sampling subcommands");
    app.add_option("--cap", cap, "Enumeration cap");

    std::string graph_path, s_path, pi_path, xi_path, family_path, spec_path, start_path;
    std::string rule = "max";
    double eps = 1e-3, grid_step = 0.0625;
    int refine = 3, replicas = 1;
    long long horizon = 1000;

    CLI::App* analyze = app.add_subcommand("analyze", "Costs, potential, chain structure");
    analyze->add_option("--graph", graph_path)->required();
    analyze->add_option("--s", s_path, "Pure profile JSON");
    analyze->add_option("--pi", pi_path, "Stochastic profile JSON");

    CLI::App* nash = app.add_subcommand("nash", "Enumerate pure Nash equilibria");
    nash->add_option("--graph", graph_path)->required();

    CLI::App* dynamics = app.add_subcommand("dynamics", "Improvement dynamics to equilibrium");
    dynamics->add_option("--graph", graph_path)->required();
    dynamics->add_option("--start", start_path, "Pure start profile JSON");
    dynamics->add_option("--rule", rule, "max | first")
        ->check(CLI::IsMember({"max", "first"}));
    dynamics->add_option("--pi", pi_path, "Stochastic start profile JSON");
    dynamics->add_option("--xi", xi_path, "Finite strategy set JSON");
    dynamics->add_option("--eps", eps, "Improvement threshold (stochastic mode)");

    CLI::App* potential = app.add_subcommand("potential", "Generalized ordinal potential");
    potential->add_option("--graph", graph_path)->required();
    potential->add_option("--s", s_path, "Pure profile JSON");
    potential->add_option("--pi", pi_path, "Stochastic profile JSON");

    CLI::App* fairness = app.add_subcommand("fairness", "Rawlsian social cost, PoA, PoS");
    fairness->add_option("--graph", graph_path)->required();
    fairness->add_option("--family", family_path, "Parameterized profile family JSON");
    fairness->add_option("--grid-step", grid_step, "Family grid step");
    fairness->add_option("--refine", refine, "Local bisection rounds");

    CLI::App* treethm = app.add_subcommand("tree-theorem", "Spanning-tree stationary identity");
    treethm->add_option("--graph", graph_path)->required();
    treethm->add_option("--pi", pi_path)->required();

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo holding frequencies");
    simulate_cmd->add_option("--graph", graph_path)->required();
    simulate_cmd->add_option("--s", s_path, "Pure profile JSON");
    simulate_cmd->add_option("--pi", pi_path, "Stochastic profile JSON");
    simulate_cmd->add_option("--T", horizon, "Steps per replica");
    simulate_cmd->add_option("--replicas", replicas, "Independent replicas");

    CLI::App* pagerank = app.add_subcommand("pagerank", "PageRank game best-response dynamics");
    pagerank->add_option("--spec", spec_path)->required();

    CLI::App* bhg = app.add_subcommand("bhg", "Buck-holding ascent dynamics");
    bhg->add_option("--graph", graph_path)->required();
    bhg->add_option("--start", start_path)->required();

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<std::string> argv_like = args;
    try {
        app.parse(std::vector<std::string>(argv_like.rbegin(), argv_like.rend()));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        nlohmann::json rep;
        if (analyze->parsed()) {
            const LoadedGraph lg = load_graph(graph_path);
            if (s_path.empty() == pi_path.empty())
                throw ValidationError("analyze: exactly one of --s and --pi is required");
            if (!s_path.empty()) {
                const PureProfile s = parse_profile(slurp(s_path), lg.g, s_path);
                const DetCostVector costs = det_cost_vector(lg.g, lg.mu, s);
                const UnicycleDecomposition dec = unicycle_decomposition(lg.g, s);
                rep["mode"] = "pure";
                rep["costs"] = rat_array(costs.c);
                rep["potential"] = det_potential(lg.g, s);
                nlohmann::json comps = nlohmann::json::array();
                for (const auto& c : dec.components) {
                    nlohmann::json cj;
                    cj["vertices"] = int_array(c.vertices);
                    cj["cycle"] = int_array(c.cycle);
                    comps.push_back(cj);
                }
                rep["decomposition"] = comps;
            } else {
                const StochasticProfile sp =
                    parse_stochastic_profile(slurp(pi_path), lg.g, pi_path);
                const GameAnalysis ga = stoch_cost_vector(lg.g, lg.mu, sp.pi);
                rep["mode"] = "stochastic";
                rep["costs"] = double_array(ga.costs.c);
                rep["potential"] = ga.potential;
                nlohmann::json classes = nlohmann::json::array();
                for (const auto& c : ga.structure.classes) classes.push_back(int_array(c));
                nlohmann::json closures = nlohmann::json::array();
                for (const auto& c : ga.structure.closures) closures.push_back(int_array(c));
                rep["classes"] = classes;
                rep["closures"] = closures;
                rep["residual"] = int_array(ga.structure.residual);
                rep["class_mass"] = double_array(ga.structure.class_mass);
                nlohmann::json rho = nlohmann::json::array();
                for (const auto& r : ga.per_class_rho) rho.push_back(double_array(r));
                rep["per_class_rho"] = rho;
            }
        } else if (nash->parsed()) {
            const LoadedGraph lg = load_graph(graph_path);
            const auto eqs = enumerate_pure_nash(lg.g, lg.mu, cap);
            rep["count"] = static_cast<long long>(eqs.size());
            nlohmann::json list = nlohmann::json::array();
            for (const auto& s : eqs) {
                nlohmann::json e;
                e["s"] = int_array(s.s);
                e["costs"] = rat_array(det_cost_vector(lg.g, lg.mu, s).c);
                e["potential"] = det_potential(lg.g, s);
                list.push_back(e);
            }
            rep["equilibria"] = list;
        } else if (dynamics->parsed()) {
            const LoadedGraph lg = load_graph(graph_path);
            const bool pure_mode = !start_path.empty();
            const bool stoch_mode = !xi_path.empty();
            if (pure_mode == stoch_mode)
                throw ValidationError(
                    "dynamics: pass either --start (pure mode) or --xi with --pi "
                    "(stochastic mode)");
            if (pure_mode) {
                const PureProfile s0 = parse_profile(slurp(start_path), lg.g, start_path);
                const DynRule r =
                    rule == "first" ? DynRule::FirstImprovement : DynRule::MaxImprovement;
                const int step_cap =
                    static_cast<int>(std::min<long long>(cap, 1000000000LL));
                const ImprovementPath path =
                    improvement_dynamics(lg.g, lg.mu, s0, r, step_cap);
                rep["mode"] = "pure";
                rep["length"] = static_cast<long long>(path.steps.size());
                nlohmann::json steps = nlohmann::json::array();
                for (const auto& st : path.steps) steps.push_back(pure_step_json(st));
                rep["steps"] = steps;
                nlohmann::json fin;
                fin["s"] = int_array(path.final_profile.s);
                fin["costs"] = rat_array(det_cost_vector(lg.g, lg.mu, path.final_profile).c);
                fin["potential"] = det_potential(lg.g, path.final_profile);
                rep["final"] = fin;
            } else {
                if (pi_path.empty())
                    throw ValidationError("dynamics: stochastic mode needs --pi for the start");
                const StochasticProfile start =
                    parse_stochastic_profile(slurp(pi_path), lg.g, pi_path);
                const FiniteStrategySet xi = parse_strategy_set(slurp(xi_path), lg.g, xi_path);
                const StochPath path = epsilon_dynamics(lg.g, lg.mu, xi, eps, start.pi);
                rep["mode"] = "stochastic";
                rep["eps"] = eps;
                rep["eps_ne_verified"] = path.eps_ne_verified;
                rep["length"] = static_cast<long long>(path.steps.size());
                nlohmann::json steps = nlohmann::json::array();
                for (const auto& st : path.steps) {
                    nlohmann::json sj;
                    sj["player"] = st.player;
                    sj["improvement"] = st.improvement;
                    steps.push_back(sj);
                }
                rep["steps"] = steps;
                rep["final_costs"] =
                    double_array(stoch_cost_vector(lg.g, lg.mu, path.final_pi).costs.c);
            }
        } else if (potential->parsed()) {
            const LoadedGraph lg = load_graph(graph_path);
            if (s_path.empty() == pi_path.empty())
                throw ValidationError("potential: exactly one of --s and --pi is required");
            if (!s_path.empty()) {
                const PureProfile s = parse_profile(slurp(s_path), lg.g, s_path);
                rep["potential"] = det_potential(lg.g, s);
                rep["costs"] = rat_array(det_cost_vector(lg.g, lg.mu, s).c);
            } else {
                const StochasticProfile sp =
                    parse_stochastic_profile(slurp(pi_path), lg.g, pi_path);
                rep["potential"] = stoch_potential(lg.g, sp.pi);
            }
        } else if (fairness->parsed()) {
            const LoadedGraph lg = load_graph(graph_path);
            const FairnessReportDet det = fairness_report_det(lg.g, lg.mu, cap);
            nlohmann::json dj;
            dj["min_sc"] = rat_to_string(det.min_sc);
            dj["worst_ne_sc"] = rat_to_string(det.worst_ne_sc);
            dj["best_ne_sc"] = rat_to_string(det.best_ne_sc);
            dj["poa"] = rat_to_string(det.poa);
            dj["pos"] = rat_to_string(det.pos);
            dj["ne_count"] = det.ne_count;
            nlohmann::json wit;
            wit["min"] = int_array(det.min_witness.s);
            wit["worst_ne"] = int_array(det.worst_ne_witness.s);
            wit["best_ne"] = int_array(det.best_ne_witness.s);
            dj["witnesses"] = wit;
            rep["det"] = dj;
            if (!family_path.empty()) {
                const ParamFamily fam =
                    parse_param_family(slurp(family_path), lg.g, family_path);
                const FairnessReportParam par =
                    fairness_report_param(lg.g, lg.mu, fam, refine, grid_step);
                nlohmann::json pj;
                pj["min_sc"] = par.min_sc;
                pj["min_theta"] = double_array(par.min_theta);
                pj["worst_ne_sc"] = par.worst_ne_sc;
                pj["worst_ne_theta"] = double_array(par.worst_ne_theta);
                pj["best_ne_sc"] = par.best_ne_sc;
                pj["best_ne_theta"] = double_array(par.best_ne_theta);
                pj["poa"] = par.poa;
                pj["pos"] = par.pos;
                pj["ne_grid_points"] = par.ne_grid_points;
                pj["grid_step"] = par.grid_step;
                pj["dev_grid_step"] = par.dev_grid_step;
                pj["refine_rounds"] = par.refine_rounds;
                pj["certification"] = par.certification;
                rep["param"] = pj;
            }
        } else if (treethm->parsed()) {
            const LoadedGraph lg = load_graph(graph_path);
            const StochasticProfile sp = parse_stochastic_profile(slurp(pi_path), lg.g, pi_path);
            std::vector<int> all(static_cast<size_t>(lg.g.n));
            for (int i = 0; i < lg.g.n; ++i) all[static_cast<size_t>(i)] = i;
            const TreeVolumes tv = tree_volumes(sp.pi, all);
            rep["omega"] = double_array(tv.omega);
            rep["omega_V"] = tv.omega_V;
            rep["spectral"] = omega_spectral(sp.pi, all);
            rep["rho_trees"] = double_array(stationary_via_trees(sp.pi, all));
            rep["rho_linear"] = double_array(stationary_distribution(sp.pi));
        } else if (simulate_cmd->parsed()) {
            const LoadedGraph lg = load_graph(graph_path);
            if (s_path.empty() == pi_path.empty())
                throw ValidationError("simulate: exactly one of --s and --pi is required");
            Eigen::MatrixXd pi;
            if (!s_path.empty())
                pi = lift_profile(lg.g, parse_profile(slurp(s_path), lg.g, s_path));
            else
                pi = parse_stochastic_profile(slurp(pi_path), lg.g, pi_path).pi;
            SimConfig cfg;
            cfg.T = horizon;
            cfg.replicas = replicas;
            cfg.seed = seed;
            const SimResult sim = simulate(lg.g, lg.mu, pi, cfg);
            const CostVector analytic = stoch_cost_vector(lg.g, lg.mu, pi).costs;
            std::vector<double> z(analytic.c.size(), 0.0);
            for (size_t i = 0; i < z.size(); ++i)
                if (sim.std_error[i] >= 1e-15)
                    z[i] = (sim.empirical[i] - analytic.c[i]) / sim.std_error[i];
            rep["empirical"] = double_array(sim.empirical);
            rep["analytic"] = double_array(analytic.c);
            rep["z_scores"] = double_array(z);
        } else if (pagerank->parsed()) {
            const PageRankSpec spec = parse_pagerank_spec(slurp(spec_path), spec_path);
            const PageRankResult res = pagerank_equilibrium(spec, cap);
            rep["choice"] = int_array(res.choice);
            rep["rank"] = double_array(res.rank);
            rep["rounds"] = res.rounds;
        } else if (bhg->parsed()) {
            const LoadedGraph lg = load_graph(graph_path);
            const PureProfile s0 = parse_profile(slurp(start_path), lg.g, start_path);
            const BhgResult res = bhg_dynamics(lg.g, lg.mu, s0);
            rep["length"] = static_cast<long long>(res.path.steps.size());
            nlohmann::json steps = nlohmann::json::array();
            for (const auto& st : res.path.steps) steps.push_back(pure_step_json(st));
            rep["steps"] = steps;
            nlohmann::json fin;
            fin["s"] = int_array(res.path.final_profile.s);
            fin["payoffs"] = rat_array(det_cost_vector(lg.g, lg.mu, res.path.final_profile).c);
            fin["potential"] = det_potential(lg.g, res.path.final_profile);
            rep["final"] = fin;
            rep["wpfne_sampled"] = res.wpfne_sampled;
        }
        emit(rep, format, out);
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    args.reserve(static_cast<size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, out, err);
}

} // namespace buckpass
