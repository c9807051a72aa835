#pragma once

#include "fkd/fkd.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <new>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fkd::cli {

enum ExitCode : int { kOk = 0, kInfeasible = 1, kUsage = 2, kResource = 3 };

/// Everything the command line selects; filled by CLI11 before any work.
struct RunConfig {
    std::string subcommand;
    std::string method = "auto";
    std::string instance_path;
    std::string ordering_path;
    std::string expression_path;
    std::string td_path;
    std::string side_path;
    std::string epsilon;
    std::string generator;
    bool chordal = false;
    bool prune = false;
    bool json = false;
    std::size_t threads = 1;
    std::size_t profile_cap = kDefaultProfileCap;
    std::uint64_t enum_cap = kDefaultEnumerationCap;
    std::uint64_t seed = 0;

    std::size_t na = 4, nb = 4, n = 8, width = 2, k = 2, leaves = 6, labels = 3;
    Profit max_profit = 9;
    std::string deletion = "1/3";
};

/// A missing side input or contradictory flags, detected after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw InvalidInput("cannot write '" + path + "'");
    }
}

inline SolveOptions options_of(const RunConfig& cfg)
{
    SolveOptions o;
    o.profile_cap = cfg.profile_cap;
    o.threads = cfg.threads;
    o.prune = cfg.prune;
    return o;
}

/// Side inputs named on the command line, loaded and parsed once.
struct SideInputs {
    std::optional<ConvexOrdering> ordering;
    std::optional<CliqueExpression> expression;
    std::optional<TreeDecomposition> td;
};

inline SideInputs load_side_inputs(const RunConfig& cfg, const Instance& inst)
{
    SideInputs side;
    if (!cfg.ordering_path.empty()) {
        const auto [a, b] = parse_ordering(read_file(cfg.ordering_path));
        side.ordering = validate_convex_ordering(inst, a, b);
    }
    if (!cfg.expression_path.empty()) {
        side.expression = parse_k_expression(read_file(cfg.expression_path));
    }
    if (!cfg.td_path.empty()) {
        side.td = parse_tree_decomposition(read_file(cfg.td_path));
    } else if (cfg.chordal) {
        side.td = clique_tree_of_chordal(inst);
        if (!side.td) {
            throw InvalidInput("graph is not chordal: maximum cardinality search found no perfect elimination order");
        }
    }
    return side;
}

inline ExactResult solve_edgeless(const Instance& inst, const SolveOptions& options)
{
    ExactResult out{edgeless_profiles(inst.profits(), options.profile_cap), {}};
    Solution& sol = out.solution;
    sol.method = "edgeless";
    sol.profile = best_profile(out.profiles);
    sol.optimum = satisfaction_level(sol.profile);
    const auto assignment = edgeless_assignment(inst.profits(), sol.profile, options.profile_cap);
    sol.witness = Coloring::from_assignment(*assignment, inst.k());
    sol.stats.dp_cells = inst.n();
    sol.stats.profiles_stored = out.profiles.size();
    certify(inst, sol);
    return out;
}

inline ExactResult solve_brute(const Instance& inst, const RunConfig& cfg, bool want_profiles)
{
    ExactResult out{ProfileSet(inst.k()), brute_force_optimum(inst, cfg.enum_cap)};
    if (want_profiles) {
        out.profiles = brute_force_profiles(inst, cfg.enum_cap, cfg.profile_cap);
        out.solution.stats.profiles_stored = out.profiles.size();
    }
    return out;
}

inline ExactResult solve_cw_with(const Instance& inst, const SideInputs& side, const SolveOptions& options)
{
    if (!side.expression) {
        throw UsageError("method cw needs --expression FILE");
    }
    return solve_cliquewidth(inst, *side.expression, options);
}

inline ExactResult solve_tin_with(const Instance& inst, const SideInputs& side, const SolveOptions& options)
{
    if (!side.td) {
        throw UsageError("method tin needs --td FILE or --chordal");
    }
    return solve_tin(inst, *side.td, options);
}

/// Dispatch for solve/profiles. `auto` tries the edgeless fast path, convex
/// recognition, the supplied expression or decomposition, then brute force.
inline ExactResult dispatch(const Instance& inst, const RunConfig& cfg, const SideInputs& side, bool want_profiles)
{
    const SolveOptions options = options_of(cfg);
    if (cfg.method == "brute") {
        return solve_brute(inst, cfg, want_profiles);
    }
    if (cfg.method == "convex") {
        return solve_convex(inst, side.ordering, options);
    }
    if (cfg.method == "cw") {
        return solve_cw_with(inst, side, options);
    }
    if (cfg.method == "tin") {
        return solve_tin_with(inst, side, options);
    }
    if (inst.edges().empty()) {
        return solve_edgeless(inst, options);
    }
    if (side.ordering) {
        return solve_convex(inst, side.ordering, options);
    }
    if (auto co = recognize_convex(inst)) {
        return solve_convex(inst, co, options);
    }
    if (side.expression) {
        return solve_cw_with(inst, side, options);
    }
    if (side.td) {
        return solve_tin_with(inst, side, options);
    }
    try {
        return solve_brute(inst, cfg, want_profiles);
    } catch (const ResourceLimit& e) {
        throw InvalidInput(std::string("no applicable method: not convex bipartite, no expression or decomposition "
                                       "given, and brute force is over the cap (") +
                           e.what() + ")");
    }
}

inline Json witness_json(const Coloring& c)
{
    Json classes = Json::array();
    for (const auto& cls : c.classes) {
        Json ids = Json::array();
        for (Vertex v : cls) {
            ids.push_back(v + 1);
        }
        classes.push_back(std::move(ids));
    }
    return classes;
}

inline Json solution_json(const Solution& sol, double elapsed_ms)
{
    Json j;
    j["optimum"] = sol.optimum;
    j["profile"] = sol.profile;
    j["witness"] = witness_json(sol.witness);
    j["method"] = sol.method;
    j["stats"] = {{"elapsed-ms", elapsed_ms},
                  {"dp-cells", sol.stats.dp_cells},
                  {"profiles-stored", sol.stats.profiles_stored}};
    return j;
}

inline void print_solution(std::ostream& out, const Solution& sol, double elapsed_ms)
{
    out << "optimum " << sol.optimum << "\nprofile";
    for (Profit p : sol.profile) {
        out << ' ' << p;
    }
    out << "\nmethod " << sol.method << '\n';
    for (std::size_t j = 0; j < sol.witness.classes.size(); ++j) {
        out << "agent " << j + 1 << ':';
        for (Vertex v : sol.witness.classes[j]) {
            out << ' ' << v + 1;
        }
        out << '\n';
    }
    out << "stats elapsed-ms " << elapsed_ms << " dp-cells " << sol.stats.dp_cells << " profiles-stored "
        << sol.stats.profiles_stored << '\n';
}

inline double millis_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

inline std::pair<std::uint64_t, std::uint64_t> parse_probability(const std::string& text)
{
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const auto num = std::stoull(text.substr(0, slash));
            const auto den = std::stoull(text.substr(slash + 1));
            if (den > 0 && num <= den) {
                return {num, den};
            }
        }
    } catch (const std::logic_error&) {
    }
    throw UsageError("--deletion expects a fraction a/b with 0 <= a <= b, got '" + text + "'");
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out, bool profiles_only)
{
    const auto start = std::chrono::steady_clock::now();
    const Instance inst = parse_instance(read_file(cfg.instance_path));
    const SideInputs side = load_side_inputs(cfg, inst);
    const ExactResult res = dispatch(inst, cfg, side, profiles_only);
    const double ms = millis_since(start);
    if (profiles_only) {
        if (cfg.json) {
            Json j;
            j["method"] = res.solution.method;
            j["profiles"] = Json::array();
            for (const auto& q : res.profiles.sorted()) {
                j["profiles"].push_back(q);
            }
            out << j.dump(2) << '\n';
        } else {
            out << dump_profiles(res.profiles);
        }
        return kOk;
    }
    if (cfg.json) {
        out << solution_json(res.solution, ms).dump(2) << '\n';
    } else {
        print_solution(out, res.solution, ms);
    }
    return kOk;
}

inline int cmd_recognize(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const Instance inst = parse_instance(read_file(cfg.instance_path));
    std::string why;
    const auto co = recognize_convex(inst, &why);
    if (!co) {
        err << "fkd: not convex bipartite: " << why << '\n';
        return kInfeasible;
    }
    if (cfg.json) {
        Json j;
        j["A"] = Json::array();
        j["B"] = Json::array();
        for (Vertex a : co->a_order) {
            j["A"].push_back(a + 1);
        }
        for (Vertex b : co->b_vertices) {
            j["B"].push_back(b + 1);
        }
        out << j.dump(2) << '\n';
    } else {
        out << serialize_ordering(*co);
    }
    return kOk;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out)
{
    const Instance inst = parse_instance(read_file(cfg.instance_path));
    const SideInputs side = load_side_inputs(cfg, inst);
    Json j;
    j["n"] = inst.n();
    j["m"] = inst.edges().size();
    j["k"] = inst.k();
    j["max-total-profit"] = max_total_profit(inst);
    if (side.ordering) {
        j["ordering"] = "valid";
    }
    if (side.expression) {
        if (auto diff = check_expression_matches(*side.expression, inst)) {
            throw InvalidInput("expression does not build the instance graph: " + *diff);
        }
        j["expression"] = {{"labels", side.expression->labels}, {"nodes", side.expression->nodes.size()}};
    }
    if (side.td) {
        const TdReport report = validate_td(inst, *side.td);
        j["decomposition"] = {{"bags", side.td->bags.size()},
                              {"width", report.width},
                              {"independence", report.independence}};
    }
    if (cfg.json) {
        out << j.dump(2) << '\n';
        return kOk;
    }
    out << "instance ok: n " << inst.n() << " m " << inst.edges().size() << " k " << inst.k() << '\n';
    if (side.ordering) {
        out << "ordering ok\n";
    }
    if (side.expression) {
        out << "expression ok: labels " << side.expression->labels << '\n';
    }
    if (side.td) {
        out << "decomposition ok: bags " << side.td->bags.size() << " width " << j["decomposition"]["width"]
            << " independence " << j["decomposition"]["independence"] << '\n';
    }
    return kOk;
}

inline int cmd_approx(const RunConfig& cfg, std::ostream& out)
{
    const auto start = std::chrono::steady_clock::now();
    const Epsilon eps = parse_epsilon(cfg.epsilon);
    const Instance inst = parse_instance(read_file(cfg.instance_path));
    const SideInputs side = load_side_inputs(cfg, inst);
    const SolveOptions options = options_of(cfg);
    ExactSolver solver;
    if (cfg.method == "convex") {
        const auto co = side.ordering ? side.ordering : recognize_convex(inst);
        if (!co) {
            throw InvalidInput("method convex: graph is not convex bipartite");
        }
        solver = [co, options](const Instance& scaled) { return solve_convex(scaled, co, options).solution; };
    } else if (cfg.method == "cw") {
        if (!side.expression) {
            throw UsageError("method cw needs --expression FILE");
        }
        solver = [&](const Instance& scaled) { return solve_cliquewidth(scaled, *side.expression, options).solution; };
    } else {
        if (!side.td) {
            throw UsageError("method tin needs --td FILE or --chordal");
        }
        solver = [&](const Instance& scaled) { return solve_tin(scaled, *side.td, options).solution; };
    }
    const FptasResult res = fptas(inst, eps, solver);
    const double ms = millis_since(start);
    const auto g = std::gcd(eps.num, eps.den);
    const std::string fraction = std::to_string(eps.num / g) + "/" + std::to_string(eps.den / g);
    if (cfg.json) {
        Json j = solution_json(res.solution, ms);
        j["epsilon"] = eps.value();
        j["guarantee"] = {{"ratio", 1.0 - eps.value()},
                          {"epsilon", fraction},
                          {"solver-calls", res.solver_calls},
                          {"accepted-guess", res.accepted_guess},
                          {"scale", res.scale}};
        out << j.dump(2) << '\n';
    } else {
        print_solution(out, res.solution, ms);
        out << "epsilon " << fraction << " guarantee optimum >= (1 - epsilon) * OPT"
            << " solver-calls " << res.solver_calls << " scale " << res.scale << '\n';
    }
    return kOk;
}

inline int cmd_gen(const RunConfig& cfg, std::ostream& out)
{
    std::string instance_text, side_text;
    if (cfg.generator == "convex") {
        const auto s = gen_convex_bipartite(cfg.na, cfg.nb, cfg.k, cfg.max_profit, cfg.seed);
        instance_text = serialize_instance(s.instance);
        side_text = serialize_ordering(s.ordering);
    } else if (cfg.generator == "ktree") {
        const auto [num, den] = parse_probability(cfg.deletion);
        if (cfg.width >= cfg.n) {
            throw UsageError("gen ktree needs --width < --n");
        }
        const auto s = gen_partial_ktree(cfg.n, cfg.width, cfg.k, cfg.max_profit, cfg.seed, num, den);
        instance_text = serialize_instance(s.instance);
        side_text = serialize_tree_decomposition(s.decomposition);
    } else if (cfg.generator == "cw") {
        if (cfg.leaves == 0 || cfg.labels == 0) {
            throw UsageError("gen cw needs --leaves >= 1 and --labels >= 1");
        }
        const auto s = gen_expression(cfg.leaves, cfg.labels, cfg.k, cfg.max_profit, cfg.seed);
        instance_text = serialize_instance(s.instance);
        side_text = serialize_k_expression(s.expression);
    } else {
        const auto [num, den] = parse_probability(cfg.deletion);
        instance_text = serialize_instance(gen_random_instance(cfg.n, cfg.k, cfg.max_profit, num, den, cfg.seed));
    }
    if (!cfg.side_path.empty()) {
        if (side_text.empty()) {
            throw UsageError("gen random has no side file");
        }
        write_file(cfg.side_path, side_text);
    }
    out << instance_text;
    return kOk;
}

inline void add_side_flags(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--ordering", cfg.ordering_path, "convex ordering file (A:/B: lines)");
    cmd->add_option("--expression", cfg.expression_path, "clique-width expression file");
    cmd->add_option("--td", cfg.td_path, "tree decomposition (.td)");
    cmd->add_flag("--chordal", cfg.chordal, "build a clique tree of a chordal graph");
}

inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    if (cfg.subcommand == "solve") {
        return cmd_solve(cfg, out, false);
    }
    if (cfg.subcommand == "profiles") {
        return cmd_solve(cfg, out, true);
    }
    if (cfg.subcommand == "recognize") {
        return cmd_recognize(cfg, out, err);
    }
    if (cfg.subcommand == "validate") {
        return cmd_validate(cfg, out);
    }
    if (cfg.subcommand == "approx") {
        return cmd_approx(cfg, out);
    }
    return cmd_gen(cfg, out);
}

} // namespace detail

/// Parses argv (argv[0] is the program name), runs the subcommand and returns
/// the exit code. Output is buffered and written to `out` once on success.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"Fair k-division under conflicts: exact and approximate solvers", "fkd"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_flag("--json", cfg.json, "JSON output");
    app.add_option("--threads", cfg.threads, "worker threads inside solvers")->check(CLI::Range(1, 1024));
    app.add_option("--profile-cap", cfg.profile_cap, "maximum profiles per set")->check(CLI::PositiveNumber);
    app.add_option("--enum-cap", cfg.enum_cap, "maximum colorings enumerated by brute force")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "generator seed");

    const std::vector<std::string> methods{"auto", "brute", "convex", "cw", "tin"};
    for (const char* name : {"solve", "profiles"}) {
        auto* cmd = app.add_subcommand(name, std::string(name) == "solve" ? "maximum satisfaction level"
                                                                           : "full profile set, one per line");
        cmd->add_option("--method", cfg.method, "solver")->check(CLI::IsMember(methods));
        detail::add_side_flags(cmd, cfg);
        if (std::string(name) == "solve") {
            cmd->add_flag("--prune", cfg.prune, "keep only Pareto-maximal profiles");
        }
        cmd->add_option("instance", cfg.instance_path, "instance file")->required();
    }
    auto* recognize = app.add_subcommand("recognize", "find a convex bipartite ordering");
    recognize->add_option("instance", cfg.instance_path, "instance file")->required();

    auto* validate = app.add_subcommand("validate", "check an instance and its side inputs");
    detail::add_side_flags(validate, cfg);
    validate->add_option("instance", cfg.instance_path, "instance file")->required();

    auto* approx = app.add_subcommand("approx", "(1 - epsilon)-approximation");
    approx->add_option("--epsilon", cfg.epsilon, "rational in (0,1), a/b or decimal")->required();
    approx->add_option("--method", cfg.method, "exact solver")->check(CLI::IsMember({"convex", "cw", "tin"}))
        ->required();
    detail::add_side_flags(approx, cfg);
    approx->add_option("instance", cfg.instance_path, "instance file")->required();

    auto* gen = app.add_subcommand("gen", "deterministic instance generators");
    gen->require_subcommand(1);
    for (const char* kind : {"convex", "ktree", "cw", "random"}) {
        auto* g = gen->add_subcommand(kind);
        g->add_option("--k", cfg.k, "agents")->check(CLI::Range(1, 64));
        g->add_option("--max-profit", cfg.max_profit, "profits drawn from [0, max]")->check(CLI::NonNegativeNumber);
        g->add_option("--side", cfg.side_path, "write the ordering, decomposition or expression here");
        const std::string k(kind);
        if (k == "convex") {
            g->add_option("--na", cfg.na, "A side size");
            g->add_option("--nb", cfg.nb, "B side size");
        }
        if (k == "ktree" || k == "random") {
            g->add_option("--n", cfg.n, "vertices");
            g->add_option("--deletion", cfg.deletion, k == "ktree" ? "edge deletion probability a/b"
                                                                   : "edge probability a/b");
        }
        if (k == "ktree") {
            g->add_option("--width", cfg.width, "k-tree width");
        }
        if (k == "cw") {
            g->add_option("--leaves", cfg.leaves, "vertices");
            g->add_option("--labels", cfg.labels, "labels")->check(CLI::Range(1, 32));
        }
    }

    try {
        app.parse(argc, argv);
        for (auto* sub : app.get_subcommands()) {
            cfg.subcommand = sub->get_name();
            for (auto* inner : sub->get_subcommands()) {
                cfg.generator = inner->get_name();
            }
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    std::ostringstream buffer;
    try {
        const int code = detail::execute(cfg, buffer, err);
        out << buffer.str();
        return code;
    } catch (const UsageError& e) {
        err << "fkd: usage: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidInput& e) {
        err << "fkd: invalid input: " << e.what() << '\n';
        return kInfeasible;
    } catch (const ResourceLimit& e) {
        err << "fkd: resource limit: " << e.what() << '\n';
        return kResource;
    } catch (const std::bad_alloc&) {
        err << "fkd: resource limit: out of memory\n";
        return kResource;
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"fkd"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace fkd::cli
