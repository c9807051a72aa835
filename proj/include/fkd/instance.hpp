#pragma once

// Conflict instances: a simple graph plus k additive profit functions.
//
// Vertex ids are 0-based in memory and 1-based in every file and report.

#include "fkd/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fkd {

using Profit = std::int64_t;
using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

/// A k-tuple of per-agent profits.
using Profile = std::vector<Profit>;

/// Minimum coordinate of a profile (0 for the empty tuple).
inline Profit satisfaction_level(const Profile& q)
{
    if (q.empty()) {
        return 0;
    }
    return *std::min_element(q.begin(), q.end());
}

class Instance {
public:
    Instance() = default;

    /// Builds and checks an instance. `profits` has k rows of n entries.
    /// Edges are normalized to (min, max) and sorted; duplicates, self-loops,
    /// out-of-range endpoints, negative profits and per-agent totals that do
    /// not fit in Profit are rejected.
    Instance(std::size_t n, std::vector<Edge> edges, std::vector<std::vector<Profit>> profits)
        : n_(n), k_(profits.size()), edges_(std::move(edges)), profits_(std::move(profits))
    {
        if (k_ == 0) {
            throw InvalidInput("instance needs at least one agent (k >= 1)");
        }
        for (std::size_t j = 0; j < k_; ++j) {
            if (profits_[j].size() != n_) {
                throw InvalidInput("agent " + std::to_string(j + 1) + " has " +
                                   std::to_string(profits_[j].size()) + " profits, expected " +
                                   std::to_string(n_));
            }
            Profit total = 0;
            for (std::size_t v = 0; v < n_; ++v) {
                const Profit p = profits_[j][v];
                if (p < 0) {
                    throw InvalidInput("negative profit for agent " + std::to_string(j + 1) +
                                       " on vertex " + std::to_string(v + 1));
                }
                if (total > std::numeric_limits<Profit>::max() - p) {
                    throw InvalidInput("total profit of agent " + std::to_string(j + 1) +
                                       " overflows a 64-bit integer");
                }
                total += p;
            }
        }
        for (auto& [u, v] : edges_) {
            if (u >= n_ || v >= n_) {
                throw InvalidInput("edge {" + std::to_string(u + 1) + "," + std::to_string(v + 1) +
                                   "} has an endpoint outside 1.." + std::to_string(n_));
            }
            if (u == v) {
                throw InvalidInput("self-loop on vertex " + std::to_string(u + 1));
            }
            if (u > v) {
                std::swap(u, v);
            }
        }
        std::sort(edges_.begin(), edges_.end());
        const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
        if (dup != edges_.end()) {
            throw InvalidInput("duplicate edge {" + std::to_string(dup->first + 1) + "," +
                               std::to_string(dup->second + 1) + "}");
        }
        adj_.assign(n_, {});
        for (const auto& [u, v] : edges_) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& list : adj_) {
            std::sort(list.begin(), list.end());
        }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }
    Profit profit(std::size_t agent, Vertex v) const { return profits_[agent][v]; }
    const std::vector<std::vector<Profit>>& profits() const noexcept { return profits_; }

    bool adjacent(Vertex u, Vertex v) const
    {
        const auto& list = adj_[u];
        return std::binary_search(list.begin(), list.end(), v);
    }

    /// p_j(V) for every agent.
    Profile totals() const
    {
        Profile out(k_, 0);
        for (std::size_t j = 0; j < k_; ++j) {
            out[j] = std::accumulate(profits_[j].begin(), profits_[j].end(), Profit{0});
        }
        return out;
    }

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::size_t n_ = 0;
    std::size_t k_ = 1;
    std::vector<Edge> edges_;
    std::vector<std::vector<Profit>> profits_ = {{}};
    std::vector<std::vector<Vertex>> adj_;
};

/// Q: the largest per-agent total profit.
inline Profit max_total_profit(const Instance& inst)
{
    const Profile t = inst.totals();
    return t.empty() ? 0 : *std::max_element(t.begin(), t.end());
}

/// X_1..X_k, each sorted ascending.
struct Coloring {
    std::vector<std::vector<Vertex>> classes;

    static Coloring empty(std::size_t k) { return Coloring{std::vector<std::vector<Vertex>>(k)}; }

    /// From a per-vertex color vector (0 = unassigned, j = agent j).
    static Coloring from_assignment(const std::vector<std::size_t>& color, std::size_t k)
    {
        Coloring c = empty(k);
        for (Vertex v = 0; v < color.size(); ++v) {
            if (color[v] != 0) {
                c.classes[color[v] - 1].push_back(v);
            }
        }
        return c;
    }

    std::vector<std::size_t> assignment(std::size_t n) const
    {
        std::vector<std::size_t> color(n, 0);
        for (std::size_t j = 0; j < classes.size(); ++j) {
            for (Vertex v : classes[j]) {
                color[v] = j + 1;
            }
        }
        return color;
    }

    friend bool operator==(const Coloring&, const Coloring&) = default;
};

/// Returns std::nullopt when `c` is a partial k-coloring of `inst`, otherwise
/// a description of the first violation found (file-level ids).
inline std::optional<std::string> validate_coloring(const Instance& inst, const Coloring& c)
{
    if (c.classes.size() != inst.k()) {
        throw InvalidInput("coloring has " + std::to_string(c.classes.size()) +
                           " classes, instance has k = " + std::to_string(inst.k()));
    }
    std::vector<std::size_t> owner(inst.n(), 0);
    for (std::size_t j = 0; j < c.classes.size(); ++j) {
        for (Vertex v : c.classes[j]) {
            if (v >= inst.n()) {
                throw InvalidInput("coloring names vertex " + std::to_string(v + 1) +
                                   " outside 1.." + std::to_string(inst.n()));
            }
            if (owner[v] != 0) {
                return "vertex " + std::to_string(v + 1) + " in two classes (" +
                       std::to_string(owner[v]) + " and " + std::to_string(j + 1) + ")";
            }
            owner[v] = j + 1;
        }
    }
    for (const auto& [u, v] : inst.edges()) {
        if (owner[u] != 0 && owner[u] == owner[v]) {
            return "edge inside class " + std::to_string(owner[u]) + ": {" + std::to_string(u + 1) +
                   "," + std::to_string(v + 1) + "}";
        }
    }
    return std::nullopt;
}

/// (p_1(X_1), ..., p_k(X_k)).
inline Profile profile_of(const Instance& inst, const Coloring& c)
{
    Profile q(inst.k(), 0);
    for (std::size_t j = 0; j < c.classes.size() && j < inst.k(); ++j) {
        for (Vertex v : c.classes[j]) {
            q[j] += inst.profit(j, v);
        }
    }
    return q;
}

/// One connected component with its induced sub-instance. `vertices[i]` is
/// the original id of sub-instance vertex i.
struct Component {
    std::vector<Vertex> vertices;
    Instance sub;

    Vertex to_original(Vertex local) const { return vertices[local]; }
};

/// Induced sub-instance on `vertices` (kept in the given order).
inline Instance induced_subinstance(const Instance& inst, const std::vector<Vertex>& vertices)
{
    std::vector<std::size_t> local(inst.n(), std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        local[vertices[i]] = i;
    }
    std::vector<Edge> edges;
    for (const auto& [u, v] : inst.edges()) {
        if (local[u] != std::numeric_limits<std::size_t>::max() &&
            local[v] != std::numeric_limits<std::size_t>::max()) {
            edges.emplace_back(local[u], local[v]);
        }
    }
    std::vector<std::vector<Profit>> profits(inst.k(), std::vector<Profit>(vertices.size()));
    for (std::size_t j = 0; j < inst.k(); ++j) {
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            profits[j][i] = inst.profit(j, vertices[i]);
        }
    }
    return Instance(vertices.size(), std::move(edges), std::move(profits));
}

/// Components ordered by smallest vertex id; vertices ascending inside each.
inline std::vector<Component> connected_components(const Instance& inst)
{
    std::vector<Component> out;
    std::vector<bool> seen(inst.n(), false);
    for (Vertex s = 0; s < inst.n(); ++s) {
        if (seen[s]) {
            continue;
        }
        std::vector<Vertex> members{s};
        seen[s] = true;
        for (std::size_t head = 0; head < members.size(); ++head) {
            for (Vertex w : inst.neighbors(members[head])) {
                if (!seen[w]) {
                    seen[w] = true;
                    members.push_back(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        Instance sub = induced_subinstance(inst, members);
        out.push_back(Component{std::move(members), std::move(sub)});
    }
    return out;
}

/// Maps a coloring of a sub-instance back to original vertex ids.
inline Coloring lift_coloring(const Coloring& local, const std::vector<Vertex>& to_original)
{
    Coloring out = Coloring::empty(local.classes.size());
    for (std::size_t j = 0; j < local.classes.size(); ++j) {
        for (Vertex v : local.classes[j]) {
            out.classes[j].push_back(to_original[v]);
        }
        std::sort(out.classes[j].begin(), out.classes[j].end());
    }
    return out;
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view tok, std::size_t line, const char* what)
{
    Int value{};
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    if (!tok.empty() && tok.front() == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range) {
        throw ParseError(line, std::string(what) + " out of range: '" + std::string(tok) + "'");
    }
    if (ec != std::errc() || ptr != last) {
        throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(tok) + "'");
    }
    return value;
}

inline std::vector<std::string_view> lines_of(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) {
                out.push_back(text.substr(start));
            }
            break;
        }
        out.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

} // namespace detail

/// Reads the `p fkd <n> <m> <k>` text format.
inline Instance parse_instance(std::string_view text)
{
    const auto lines = detail::lines_of(text);
    bool have_header = false;
    std::size_t n = 0, m = 0, k = 0;
    std::vector<std::vector<Profit>> profits;
    std::size_t next_weight = 0;
    std::vector<Edge> edges;
    std::set<Edge> seen_edges;

    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const std::size_t lineno = idx + 1;
        const auto tok = detail::split_ws(lines[idx]);
        if (tok.empty() || tok[0] == "c") {
            continue;
        }
        if (!have_header) {
            if (tok[0] != "p" || tok.size() != 5 || tok[1] != "fkd") {
                throw ParseError(lineno, "expected header 'p fkd <n> <m> <k>'");
            }
            n = detail::parse_int<std::size_t>(tok[2], lineno, "vertex count");
            m = detail::parse_int<std::size_t>(tok[3], lineno, "edge count");
            k = detail::parse_int<std::size_t>(tok[4], lineno, "agent count");
            if (k == 0) {
                throw ParseError(lineno, "agent count must be at least 1");
            }
            profits.assign(k, std::vector<Profit>(n, 0));
            have_header = true;
            continue;
        }
        if (tok[0] == "p") {
            throw ParseError(lineno, "second header line");
        }
        if (tok[0] == "w") {
            if (tok.size() != n + 2) {
                throw ParseError(lineno, "weight line needs an agent index and " + std::to_string(n) +
                                             " profits, got " + std::to_string(tok.size() - 1) +
                                             " fields");
            }
            const auto j = detail::parse_int<std::size_t>(tok[1], lineno, "agent index");
            if (j != next_weight + 1) {
                throw ParseError(lineno, "weight line for agent " + std::to_string(j) +
                                             ", expected agent " + std::to_string(next_weight + 1));
            }
            if (j > k) {
                throw ParseError(lineno, "more weight lines than agents (k = " + std::to_string(k) + ")");
            }
            for (std::size_t v = 0; v < n; ++v) {
                const auto p = detail::parse_int<Profit>(tok[v + 2], lineno, "profit");
                if (p < 0) {
                    throw ParseError(lineno, "negative profit " + std::string(tok[v + 2]) + " for vertex " +
                                                 std::to_string(v + 1));
                }
                profits[j - 1][v] = p;
            }
            ++next_weight;
            continue;
        }
        if (tok[0] == "e") {
            if (tok.size() != 3) {
                throw ParseError(lineno, "edge line needs exactly two endpoints");
            }
            const auto u = detail::parse_int<std::size_t>(tok[1], lineno, "vertex id");
            const auto v = detail::parse_int<std::size_t>(tok[2], lineno, "vertex id");
            if (u == 0 || v == 0 || u > n || v > n) {
                throw ParseError(lineno, "vertex id out of range 1.." + std::to_string(n));
            }
            if (u == v) {
                throw ParseError(lineno, "self-loop on vertex " + std::to_string(u));
            }
            const Edge e{std::min(u, v) - 1, std::max(u, v) - 1};
            if (!seen_edges.insert(e).second) {
                throw ParseError(lineno, "duplicate edge {" + std::to_string(e.first + 1) + "," +
                                             std::to_string(e.second + 1) + "}");
            }
            edges.push_back(e);
            continue;
        }
        throw ParseError(lineno, "unknown line type '" + std::string(tok[0]) + "'");
    }
    if (!have_header) {
        throw ParseError(lines.size() + 1, "missing header 'p fkd <n> <m> <k>'");
    }
    // An empty instance may omit its (empty) weight lines.
    if (next_weight != k && !(n == 0 && next_weight == 0)) {
        throw ParseError(lines.size() + 1, "declared k = " + std::to_string(k) + " but found " +
                                               std::to_string(next_weight) + " weight lines");
    }
    if (edges.size() != m) {
        throw ParseError(lines.size() + 1, "declared m = " + std::to_string(m) + " but found " +
                                               std::to_string(edges.size()) + " edge lines");
    }
    try {
        return Instance(n, std::move(edges), std::move(profits));
    } catch (const ParseError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ParseError(lines.size(), e.what());
    }
}

/// Canonical text form: header, k weight lines, edges ascending.
inline std::string serialize_instance(const Instance& inst)
{
    std::ostringstream out;
    out << "p fkd " << inst.n() << ' ' << inst.edges().size() << ' ' << inst.k() << '\n';
    for (std::size_t j = 0; j < inst.k(); ++j) {
        out << "w " << (j + 1);
        for (Vertex v = 0; v < inst.n(); ++v) {
            out << ' ' << inst.profit(j, v);
        }
        out << '\n';
    }
    for (const auto& [u, v] : inst.edges()) {
        out << "e " << (u + 1) << ' ' << (v + 1) << '\n';
    }
    return out.str();
}

} // namespace fkd
