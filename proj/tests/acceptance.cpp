// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit on any
// failure. Optional argv[1]: the unit test binary, for the property suites.

#include "fkd/fkd.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace fkd;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Verdict()>& body)
{
    const auto start = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > budget_s) {
        v.ok = false;
        v.detail += " over time budget";
    }
    failures += v.ok ? 0 : 1;
    std::printf("[%s] %d %s: %s (%.3f s, budget %g s)\n", v.ok ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs,
                budget_s);
    std::fflush(stdout);
}

std::string mismatch(const char* what, std::uint64_t seed)
{
    return std::string(what) + " mismatch at seed " + std::to_string(seed);
}

std::vector<Vertex> shuffled(std::size_t n, SplitMix64& rng)
{
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    return order;
}

/// A vertex order along the A side with each B vertex right after its last
/// neighbour, so few vertices stay active.
std::vector<Vertex> sweep_order(const ConvexOrdering& co)
{
    std::vector<Vertex> order;
    std::vector<bool> placed(co.b_vertices.size(), false);
    for (std::size_t i = 0; i < co.a_order.size(); ++i) {
        order.push_back(co.a_order[i]);
        for (std::size_t b = 0; b < co.b_vertices.size(); ++b) {
            if (!placed[b] && co.b_hi[b] == i + 1) {
                placed[b] = true;
                order.push_back(co.b_vertices[b]);
            }
        }
    }
    return order;
}

Verdict fixture()
{
    const std::vector<std::size_t> lo{1, 2, 3, 3, 3, 4, 5, 6, 5, 8, 6, 10, 11, 12};
    const std::vector<std::size_t> hi{4, 4, 4, 6, 6, 6, 6, 6, 11, 11, 13, 13, 13, 13};
    std::vector<EndpointRow> rows;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        rows.push_back({lo[i], hi[i], i});
    }
    const auto ss = stage_structure(rows);
    if (ss.u != std::vector<std::size_t>{4, 6, 11, 13} || ss.v != std::vector<std::size_t>{3, 8, 10, 14}) {
        return {false, "u or v differs from (4,6,11,13) / (3,8,10,14)"};
    }
    for (std::size_t i = 1; i < ss.b_rows.size(); ++i) {
        const auto& p = ss.b_rows[i - 1];
        const auto& q = ss.b_rows[i];
        if (p.hi > q.hi || (p.hi == q.hi && p.lo > q.lo)) {
            return {false, "B order not sorted by (hi, lo) at row " + std::to_string(i)};
        }
    }
    return {true, "u=(4,6,11,13) v=(3,8,10,14), B order sorted"};
}

Verdict edgeless()
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitMix64 rng(seed);
        const auto inst = gen_random_instance(rng.below(9), 1 + rng.below(3), 10, 0, 1, seed);
        if (edgeless_profiles(inst.profits()) != brute_force_profiles(inst)) {
            return {false, mismatch("profile set", seed)};
        }
    }
    return {true, "200 instances, exact set equality"};
}

Verdict convex()
{
    for (std::uint64_t seed = 0; seed < 250; ++seed) {
        SplitMix64 rng(seed);
        const bool full = seed >= 200;
        const std::size_t total = full ? 9 : 12;
        const std::size_t na = 1 + rng.below(total);
        const auto s = gen_convex_bipartite(na, rng.below(total - na + 1), 1 + rng.below(2), 8, seed);
        const auto res = solve_convex(s.instance, s.ordering);
        if (full ? res.profiles != brute_force_profiles(s.instance)
                 : res.solution.optimum != brute_force_optimum(s.instance).optimum) {
            return {false, mismatch(full ? "profile set" : "optimum", seed)};
        }
    }
    return {true, "200 optima, 50 full profile sets"};
}

Verdict cliquewidth()
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitMix64 rng(seed);
        const auto s = gen_expression(1 + rng.below(8), 1 + rng.below(3), 1 + rng.below(2), 8, seed);
        const auto res = solve_cliquewidth(s.instance, s.expression);
        if (res.solution.optimum != brute_force_optimum(s.instance).optimum) {
            return {false, mismatch("optimum", seed)};
        }
        if (seed < 50 && res.profiles != brute_force_profiles(s.instance)) {
            return {false, mismatch("root profile set", seed)};
        }
    }
    return {true, "200 optima, 50 root profile sets"};
}

Verdict tree_independence()
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t n = 1 + rng.below(10);
        const std::size_t width = rng.below(std::min<std::size_t>(n, 4));
        const bool chordal = seed < 50;
        const auto s = chordal ? gen_partial_ktree(n, width, 1 + rng.below(2), 8, seed, 0, 1)
                               : gen_partial_ktree(n, width, 1 + rng.below(2), 8, seed);
        TreeDecomposition td = s.decomposition;
        if (chordal) {
            const auto tree = clique_tree_of_chordal(s.instance);
            if (!tree || validate_td(s.instance, *tree).independence > 1) {
                return {false, mismatch("clique tree", seed)};
            }
            td = *tree;
        }
        if (solve_tin(s.instance, td).solution.optimum != brute_force_optimum(s.instance).optimum) {
            return {false, mismatch("optimum", seed)};
        }
    }
    return {true, "200 optima, 50 through chordal clique trees"};
}

Verdict cross_solver()
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t na = 1 + rng.below(6);
        const auto s = gen_convex_bipartite(na, 1 + rng.below(5), 1 + rng.below(2), 8, seed);
        const auto order = rng.chance(1, 2) ? sweep_order(s.ordering) : shuffled(s.instance.n(), rng);
        const auto td = path_decomposition(s.instance, order);
        const auto expr = linear_expression(s.instance, order);
        validate_td(s.instance, td);
        if (auto diff = check_expression_matches(expr, s.instance)) {
            return {false, "expression does not build the graph at seed " + std::to_string(seed) + ": " + *diff};
        }
        const Profit a = solve_convex(s.instance, s.ordering).solution.optimum;
        const Profit b = solve_cliquewidth(s.instance, expr).solution.optimum;
        const Profit c = solve_tin(s.instance, td).solution.optimum;
        if (a != b || b != c) {
            return {false, mismatch("optimum", seed)};
        }
    }
    return {true, "50 instances, convex = cw = tin"};
}

Verdict approximation()
{
    const Epsilon eps[] = {parse_epsilon("0.1"), parse_epsilon("0.25"), parse_epsilon("0.5")};
    std::size_t scaled_rounds = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 rng(seed);
        Instance inst;
        ExactSolver solver;
        if (seed % 2 == 0) {
            const std::size_t na = 1 + rng.below(6);
            auto s = gen_convex_bipartite(na, rng.below(10 - na), 1 + rng.below(2), 100, seed);
            inst = s.instance;
            solver = [co = s.ordering](const Instance& x) { return solve_convex(x, co).solution; };
        } else {
            const std::size_t n = 2 + rng.below(8);
            auto s = gen_partial_ktree(n, rng.below(std::min<std::size_t>(n, 4)), 1 + rng.below(2), 100, seed);
            inst = s.instance;
            solver = [td = s.decomposition](const Instance& x) { return solve_tin(x, td).solution; };
        }
        const Profit opt = brute_force_optimum(inst).optimum;
        const Profit Q = max_total_profit(inst);
        const auto calls = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(Q) + 1))) + 1;
        for (const auto& e : eps) {
            const auto res = fptas(inst, e, solver);
            if (res.solution.optimum * e.den < (e.den - e.num) * opt) {
                return {false, "value below (1-eps)*OPT at seed " + std::to_string(seed)};
            }
            if (res.solver_calls > calls) {
                return {false, "too many solver calls at seed " + std::to_string(seed)};
            }
            scaled_rounds += res.scale > 1;
        }
    }
    return {true, "300 trials; " + std::to_string(scaled_rounds) + " accepted with scale > 1"};
}

Verdict scaling()
{
    // Connected chain of intervals over six A vertices.
    const std::vector<std::pair<std::size_t, std::size_t>> intervals{{1, 2}, {2, 3}, {3, 4}, {4, 5},
                                                                     {5, 6}, {1, 4}, {3, 6}};
    const std::size_t na = 6;
    std::vector<Edge> edges;
    for (std::size_t b = 0; b < intervals.size(); ++b) {
        for (std::size_t a = intervals[b].first; a <= intervals[b].second; ++a) {
            edges.emplace_back(a - 1, na + b);
        }
    }
    const std::size_t n = na + intervals.size();
    std::ostringstream report;
    bool ok = true;
    for (std::size_t k = 1; k <= 2; ++k) {
        const double limit = 8.0 * std::pow(4.0, static_cast<double>(k));
        std::uint64_t previous = 0;
        report << "k=" << k << " ratios";
        // Fresh profits from [1, P] with P doubling, so Q roughly doubles.
        for (Profit P = 4; P <= 32; P *= 2) {
            SplitMix64 rng(k);
            auto profits = random_profits(rng, n, k, P - 1);
            for (auto& row : profits) {
                for (auto& p : row) {
                    p += 1;
                }
            }
            const Instance inst(n, edges, profits);
            std::vector<Vertex> a(na), b(intervals.size());
            std::iota(a.begin(), a.end(), Vertex{0});
            std::iota(b.begin(), b.end(), na);
            SolveStats stats;
            solve_connected_convex(inst, validate_convex_ordering(inst, a, b), {}, &stats);
            if (previous) {
                const double ratio = static_cast<double>(stats.combine_work) / static_cast<double>(previous);
                report << ' ' << std::round(ratio * 100) / 100;
                ok = ok && ratio <= limit;
            }
            previous = stats.combine_work;
        }
        report << " (limit " << limit << ")" << (k == 1 ? "; " : "");
    }
    return {ok, report.str()};
}

Verdict property_suites(const char* binary)
{
    if (!binary) {
        return {false, "unit test binary not given"};
    }
    const std::string cmd = std::string("\"") + binary + "\" --gtest_filter=*Property* --gtest_brief=1 > /dev/null";
    const int status = std::system(cmd.c_str());
    return {status == 0, status == 0 ? "all *Property* suites green, 1000 cases each" : "property suites failed"};
}

} // namespace

int main(int argc, char** argv)
{
    criterion(1, "fixture exactness", 0.001, fixture);
    criterion(2, "edgeless oracle equivalence", 10, edgeless);
    criterion(3, "convex solver equivalence", 300, convex);
    criterion(4, "clique-width solver equivalence", 120, cliquewidth);
    criterion(5, "tree-independence solver equivalence", 300, tree_independence);
    criterion(6, "cross-solver agreement", 120, cross_solver);
    criterion(7, "FPTAS guarantee", 300, approximation);
    criterion(8, "complexity smoke", 300, scaling);
    criterion(9, "invariant suites", 1200, [&] { return property_suites(argc > 1 ? argv[1] : nullptr); });
    std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
