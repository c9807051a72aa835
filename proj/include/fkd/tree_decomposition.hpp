#pragma once

// Tree decompositions: PACE .td I/O, validation (width and the largest
// independent set inside a bag), nice form, bag colorings, and clique trees
// of chordal graphs.

#include "fkd/error.hpp"
#include "fkd/instance.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fkd {

struct TreeDecomposition {
    /// Number of graph vertices the decomposition claims to cover.
    std::size_t n = 0;
    /// Bag i holds file bag id i+1; vertices 0-based, ascending.
    std::vector<std::vector<Vertex>> bags;
    /// Tree edges between bag indices.
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    friend bool operator==(const TreeDecomposition&, const TreeDecomposition&) = default;
};

namespace detail {

/// True when `edges` form a tree on `count` nodes.
inline std::optional<std::string> tree_shape_error(std::size_t count,
                                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    if (count == 0) {
        return "decomposition has no bags";
    }
    std::vector<std::size_t> parent(count);
    for (std::size_t i = 0; i < count; ++i) {
        parent[i] = i;
    }
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    for (const auto& [a, b] : edges) {
        const std::size_t ra = find(a), rb = find(b);
        if (ra == rb) {
            return "tree edge " + std::to_string(a + 1) + " " + std::to_string(b + 1) + " closes a cycle";
        }
        parent[ra] = rb;
    }
    if (edges.size() + 1 != count) {
        return "disconnected tree: " + std::to_string(count) + " bags but " + std::to_string(edges.size()) +
               " tree edges";
    }
    return std::nullopt;
}

inline std::vector<std::vector<std::size_t>> tree_adjacency(const TreeDecomposition& td)
{
    std::vector<std::vector<std::size_t>> adj(td.bags.size());
    for (const auto& [a, b] : td.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
    }
    return adj;
}

} // namespace detail

inline TreeDecomposition parse_tree_decomposition(std::string_view text)
{
    TreeDecomposition td;
    const auto lines = detail::lines_of(text);
    bool header = false;
    std::size_t declared_bags = 0, declared_max = 0;
    std::vector<bool> seen;
    std::size_t seen_count = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line = i + 1;
        const auto tok = detail::split_ws(lines[i]);
        if (tok.empty() || tok[0] == "c") {
            continue;
        }
        if (!header) {
            if (tok.size() != 5 || tok[0] != "s" || tok[1] != "td") {
                throw ParseError(line, "expected 's td <bags> <max_bag_size> <n>'");
            }
            declared_bags = detail::parse_int<std::size_t>(tok[2], line, "bag count");
            declared_max = detail::parse_int<std::size_t>(tok[3], line, "max bag size");
            td.n = detail::parse_int<std::size_t>(tok[4], line, "vertex count");
            td.bags.assign(declared_bags, {});
            seen.assign(declared_bags, false);
            header = true;
            continue;
        }
        if (tok[0] == "b") {
            if (tok.size() < 2) {
                throw ParseError(line, "expected 'b <bag_id> <vertices...>'");
            }
            const auto id = detail::parse_int<std::size_t>(tok[1], line, "bag id");
            if (id == 0 || id > declared_bags) {
                throw ParseError(line, "bag id " + std::to_string(id) + " outside 1.." + std::to_string(declared_bags));
            }
            if (seen[id - 1]) {
                throw ParseError(line, "duplicate bag id " + std::to_string(id));
            }
            seen[id - 1] = true;
            ++seen_count;
            auto& bag = td.bags[id - 1];
            for (std::size_t x = 2; x < tok.size(); ++x) {
                const auto v = detail::parse_int<std::size_t>(tok[x], line, "vertex");
                if (v == 0 || v > td.n) {
                    throw ParseError(line, "vertex " + std::to_string(v) + " outside 1.." + std::to_string(td.n));
                }
                bag.push_back(v - 1);
            }
            std::sort(bag.begin(), bag.end());
            if (std::adjacent_find(bag.begin(), bag.end()) != bag.end()) {
                throw ParseError(line, "bag " + std::to_string(id) + " repeats a vertex");
            }
            if (bag.size() > declared_max) {
                throw ParseError(line, "bag " + std::to_string(id) + " exceeds the declared maximum size");
            }
            continue;
        }
        if (tok.size() != 2) {
            throw ParseError(line, "expected a tree edge '<bag_id> <bag_id>'");
        }
        const auto a = detail::parse_int<std::size_t>(tok[0], line, "bag id");
        const auto b = detail::parse_int<std::size_t>(tok[1], line, "bag id");
        if (a == 0 || b == 0 || a > declared_bags || b > declared_bags) {
            throw ParseError(line, "tree edge names an unknown bag");
        }
        if (a == b) {
            throw ParseError(line, "tree edge is a loop");
        }
        td.edges.emplace_back(a - 1, b - 1);
    }
    if (!header) {
        throw ParseError(lines.size(), "missing 's td' header");
    }
    if (seen_count != declared_bags) {
        throw ParseError(lines.size(), "declared " + std::to_string(declared_bags) + " bags, found " +
                                           std::to_string(seen_count));
    }
    if (auto err = detail::tree_shape_error(td.bags.size(), td.edges)) {
        throw ParseError(lines.size(), *err);
    }
    return td;
}

inline std::string serialize_tree_decomposition(const TreeDecomposition& td)
{
    std::size_t width = 0;
    for (const auto& bag : td.bags) {
        width = std::max(width, bag.size());
    }
    std::string out = "s td " + std::to_string(td.bags.size()) + " " + std::to_string(width) + " " +
                      std::to_string(td.n) + "\n";
    for (std::size_t i = 0; i < td.bags.size(); ++i) {
        out += "b " + std::to_string(i + 1);
        for (Vertex v : td.bags[i]) {
            out += " " + std::to_string(v + 1);
        }
        out += "\n";
    }
    for (const auto& [a, b] : td.edges) {
        out += std::to_string(a + 1) + " " + std::to_string(b + 1) + "\n";
    }
    return out;
}

inline constexpr std::uint64_t kDefaultAlphaNodeCap = 50'000'000;

/// Size of a maximum independent set of G[bag], by branch and bound.
inline std::size_t bag_independence_number(const Instance& inst, const std::vector<Vertex>& bag,
                                            std::uint64_t node_cap = kDefaultAlphaNodeCap)
{
    if (bag.size() > 64) {
        throw ResourceLimit("cannot certify the independence number of a bag with " + std::to_string(bag.size()) +
                            " vertices (at most 64 supported)");
    }
    const std::size_t m = bag.size();
    std::vector<std::uint64_t> nbr(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i != j && inst.adjacent(bag[i], bag[j])) {
                nbr[i] |= 1ULL << j;
            }
        }
    }
    std::uint64_t nodes = 0;
    std::size_t best = 0;
    auto rec = [&](auto&& self, std::uint64_t open, std::size_t taken) -> void {
        if (++nodes > node_cap) {
            throw ResourceLimit("cannot certify the independence number of a bag: search exceeded " +
                                std::to_string(node_cap) + " nodes");
        }
        if (open == 0) {
            best = std::max(best, taken);
            return;
        }
        if (taken + static_cast<std::size_t>(std::popcount(open)) <= best) {
            return;
        }
        // Branch on the open vertex with the most open neighbours.
        std::size_t pick = 0;
        int degree = -1;
        for (std::uint64_t rest = open; rest; rest &= rest - 1) {
            const auto i = static_cast<std::size_t>(std::countr_zero(rest));
            const int d = std::popcount(nbr[i] & open);
            if (d > degree) {
                degree = d;
                pick = i;
            }
        }
        const std::uint64_t bit = 1ULL << pick;
        if (degree == 0) {
            // Every open vertex is isolated among the open ones.
            best = std::max(best, taken + static_cast<std::size_t>(std::popcount(open)));
            return;
        }
        self(self, open & ~bit & ~nbr[pick], taken + 1);
        self(self, open & ~bit, taken);
    };
    rec(rec, m == 64 ? ~0ULL : ((1ULL << m) - 1), 0);
    return best;
}

struct TdReport {
    /// Largest bag size minus one (-1 style width reported as 0 for empty bags).
    std::size_t width = 0;
    std::size_t max_bag = 0;
    /// Largest independent set inside a single bag.
    std::size_t independence = 0;
};

/// Checks the three decomposition axioms against `inst`; throws InvalidInput
/// naming the violated axiom and a witness.
inline TdReport validate_td(const Instance& inst, const TreeDecomposition& td,
                            std::uint64_t alpha_node_cap = kDefaultAlphaNodeCap)
{
    if (td.n != inst.n()) {
        throw InvalidInput("decomposition is for " + std::to_string(td.n) + " vertices, instance has " +
                           std::to_string(inst.n()));
    }
    if (auto err = detail::tree_shape_error(td.bags.size(), td.edges)) {
        throw InvalidInput(*err);
    }
    std::vector<std::vector<std::size_t>> holders(inst.n());
    for (std::size_t b = 0; b < td.bags.size(); ++b) {
        for (Vertex v : td.bags[b]) {
            if (v >= inst.n()) {
                throw InvalidInput("bag " + std::to_string(b + 1) + " names unknown vertex " + std::to_string(v + 1));
            }
            holders[v].push_back(b);
        }
    }
    for (Vertex v = 0; v < inst.n(); ++v) {
        if (holders[v].empty()) {
            throw InvalidInput("vertex coverage violated: vertex " + std::to_string(v + 1) + " is in no bag");
        }
    }
    for (const auto& [u, v] : inst.edges()) {
        bool covered = false;
        for (std::size_t b : holders[u]) {
            covered = covered || std::binary_search(td.bags[b].begin(), td.bags[b].end(), v);
        }
        if (!covered) {
            throw InvalidInput("edge coverage violated: edge {" + std::to_string(u + 1) + "," +
                               std::to_string(v + 1) + "} is in no bag");
        }
    }
    const auto adj = detail::tree_adjacency(td);
    std::vector<bool> holds(td.bags.size(), false), reached(td.bags.size(), false);
    for (Vertex v = 0; v < inst.n(); ++v) {
        for (std::size_t b : holders[v]) {
            holds[b] = true;
        }
        std::vector<std::size_t> stack{holders[v].front()};
        reached[stack.back()] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            for (std::size_t y : adj[x]) {
                if (holds[y] && !reached[y]) {
                    reached[y] = true;
                    ++count;
                    stack.push_back(y);
                }
            }
        }
        if (count != holders[v].size()) {
            throw InvalidInput("connectivity violated: the bags holding vertex " + std::to_string(v + 1) +
                               " do not form a subtree");
        }
        for (std::size_t b : holders[v]) {
            holds[b] = false;
            reached[b] = false;
        }
    }
    TdReport report;
    for (const auto& bag : td.bags) {
        report.max_bag = std::max(report.max_bag, bag.size());
        report.independence = std::max(report.independence, bag_independence_number(inst, bag, alpha_node_cap));
    }
    report.width = report.max_bag == 0 ? 0 : report.max_bag - 1;
    return report;
}

/// A decomposition with one bag holding every vertex.
inline TreeDecomposition trivial_decomposition(std::size_t n)
{
    TreeDecomposition td;
    td.n = n;
    td.bags.emplace_back();
    for (Vertex v = 0; v < n; ++v) {
        td.bags[0].push_back(v);
    }
    return td;
}

struct NiceNode {
    enum class Kind { Leaf, Introduce, Forget, Join };
    Kind kind = Kind::Leaf;
    /// Introduced or forgotten vertex.
    Vertex vertex = 0;
    std::vector<Vertex> bag;
    std::size_t left = 0;
    std::size_t right = 0;
};

struct NiceTreeDecomposition {
    /// Children precede parents; the root (empty bag) is last.
    std::vector<NiceNode> nodes;

    std::size_t root() const { return nodes.size() - 1; }
};

inline const char* to_string(NiceNode::Kind kind)
{
    switch (kind) {
    case NiceNode::Kind::Leaf: return "leaf";
    case NiceNode::Kind::Introduce: return "introduce";
    case NiceNode::Kind::Forget: return "forget";
    case NiceNode::Kind::Join: return "join";
    }
    return "?";
}

/// Rooted at the last bag. Each child chain forgets the vertices leaving the
/// bag, then introduces the new ones (ascending); siblings meet in binary
/// joins; the root bag is forgotten down to the empty bag.
inline NiceTreeDecomposition make_nice(const TreeDecomposition& td)
{
    NiceTreeDecomposition nice;
    if (td.bags.empty()) {
        nice.nodes.push_back(NiceNode{});
        return nice;
    }
    const auto adj = detail::tree_adjacency(td);
    const std::size_t root = td.bags.size() - 1;
    std::vector<std::size_t> parent(td.bags.size(), std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> order{root};
    parent[root] = root;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t y : adj[order[i]]) {
            if (parent[y] == std::numeric_limits<std::size_t>::max()) {
                parent[y] = order[i];
                order.push_back(y);
            }
        }
    }
    auto push = [&](NiceNode node) {
        nice.nodes.push_back(std::move(node));
        return nice.nodes.size() - 1;
    };
    // Moves the chain ending at node x (bag `from`) to bag `to`.
    auto transform = [&](std::size_t x, const std::vector<Vertex>& to) {
        std::vector<Vertex> bag = nice.nodes[x].bag;
        for (Vertex v : std::vector<Vertex>(bag)) {
            if (!std::binary_search(to.begin(), to.end(), v)) {
                bag.erase(std::find(bag.begin(), bag.end(), v));
                x = push(NiceNode{NiceNode::Kind::Forget, v, bag, x, 0});
            }
        }
        for (Vertex v : to) {
            if (!std::binary_search(bag.begin(), bag.end(), v)) {
                bag.insert(std::lower_bound(bag.begin(), bag.end(), v), v);
                x = push(NiceNode{NiceNode::Kind::Introduce, v, bag, x, 0});
            }
        }
        return x;
    };
    std::vector<std::size_t> top(td.bags.size());
    for (std::size_t i = order.size(); i-- > 0;) {
        const std::size_t b = order[i];
        std::optional<std::size_t> acc;
        for (std::size_t c : adj[b]) {
            if (c == parent[b] && b != root) {
                continue;
            }
            if (parent[c] != b || c == b) {
                continue;
            }
            const std::size_t chain = transform(top[c], td.bags[b]);
            acc = acc ? push(NiceNode{NiceNode::Kind::Join, 0, td.bags[b], *acc, chain}) : chain;
        }
        if (!acc) {
            acc = transform(push(NiceNode{}), td.bags[b]);
        }
        top[b] = *acc;
    }
    transform(top[root], {});
    return nice;
}

/// The nice decomposition viewed as a plain one (for revalidation).
inline TreeDecomposition to_tree_decomposition(const NiceTreeDecomposition& nice, std::size_t n)
{
    TreeDecomposition td;
    td.n = n;
    for (std::size_t x = 0; x < nice.nodes.size(); ++x) {
        const auto& node = nice.nodes[x];
        td.bags.push_back(node.bag);
        if (node.kind == NiceNode::Kind::Introduce || node.kind == NiceNode::Kind::Forget ||
            node.kind == NiceNode::Kind::Join) {
            td.edges.emplace_back(node.left, x);
        }
        if (node.kind == NiceNode::Kind::Join) {
            td.edges.emplace_back(node.right, x);
        }
    }
    return td;
}

/// nullopt when every node satisfies its kind's bag relation and the root
/// bag is empty.
inline std::optional<std::string> check_nice(const NiceTreeDecomposition& nice)
{
    for (std::size_t x = 0; x < nice.nodes.size(); ++x) {
        const auto& node = nice.nodes[x];
        const std::string where = "node " + std::to_string(x) + " (" + to_string(node.kind) + ")";
        if (!std::is_sorted(node.bag.begin(), node.bag.end())) {
            return where + ": bag not sorted";
        }
        auto child_bag = [&](std::size_t c) -> const std::vector<Vertex>& { return nice.nodes[c].bag; };
        switch (node.kind) {
        case NiceNode::Kind::Leaf:
            if (!node.bag.empty()) {
                return where + ": leaf bag is not empty";
            }
            break;
        case NiceNode::Kind::Introduce: {
            auto expect = child_bag(node.left);
            if (node.left >= x || std::binary_search(expect.begin(), expect.end(), node.vertex)) {
                return where + ": bad child";
            }
            expect.insert(std::lower_bound(expect.begin(), expect.end(), node.vertex), node.vertex);
            if (expect != node.bag) {
                return where + ": bag is not child bag plus the vertex";
            }
            break;
        }
        case NiceNode::Kind::Forget: {
            auto expect = node.bag;
            if (node.left >= x || std::binary_search(expect.begin(), expect.end(), node.vertex)) {
                return where + ": bad child";
            }
            expect.insert(std::lower_bound(expect.begin(), expect.end(), node.vertex), node.vertex);
            if (expect != child_bag(node.left)) {
                return where + ": bag is not child bag minus the vertex";
            }
            break;
        }
        case NiceNode::Kind::Join:
            if (node.left >= x || node.right >= x || child_bag(node.left) != node.bag ||
                child_bag(node.right) != node.bag) {
                return where + ": children bags differ";
            }
            break;
        }
    }
    if (nice.nodes.empty() || !nice.nodes.back().bag.empty()) {
        return std::string("root bag is not empty");
    }
    return std::nullopt;
}

/// Every assignment bag -> {0..k} whose color classes are independent, in
/// mixed-radix order with the first bag vertex most significant.
inline std::vector<std::vector<std::size_t>> enumerate_bag_colorings(const Instance& inst,
                                                                     const std::vector<Vertex>& bag)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> color(bag.size(), 0);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == bag.size()) {
            out.push_back(color);
            return;
        }
        for (std::size_t c = 0; c <= inst.k(); ++c) {
            bool ok = true;
            for (std::size_t x = 0; x < i && ok && c != 0; ++x) {
                ok = !(color[x] == c && inst.adjacent(bag[x], bag[i]));
            }
            if (ok) {
                color[i] = c;
                self(self, i + 1);
            }
        }
        color[i] = 0;
    };
    rec(rec, 0);
    return out;
}

/// Clique tree of a chordal graph (bags are the maximal cliques), or nullopt
/// when the graph is not chordal.
inline std::optional<TreeDecomposition> clique_tree_of_chordal(const Instance& inst)
{
    const std::size_t n = inst.n();
    TreeDecomposition td;
    td.n = n;
    if (n == 0) {
        td.bags.emplace_back();
        return td;
    }
    // Maximum cardinality search, ties to the smallest id.
    std::vector<std::size_t> weight(n, 0), position(n, 0);
    std::vector<bool> done(n, false);
    std::vector<Vertex> visit;
    for (std::size_t step = 0; step < n; ++step) {
        Vertex pick = n;
        for (Vertex v = 0; v < n; ++v) {
            if (!done[v] && (pick == n || weight[v] > weight[pick])) {
                pick = v;
            }
        }
        done[pick] = true;
        visit.push_back(pick);
        for (Vertex w : inst.neighbors(pick)) {
            if (!done[w]) {
                ++weight[w];
            }
        }
    }
    // Elimination order is the reverse visit order.
    const std::vector<Vertex> peo(visit.rbegin(), visit.rend());
    for (std::size_t i = 0; i < n; ++i) {
        position[peo[i]] = i;
    }
    std::vector<std::vector<Vertex>> candidates;
    for (Vertex v : peo) {
        std::vector<Vertex> clique{v};
        for (Vertex w : inst.neighbors(v)) {
            if (position[w] > position[v]) {
                clique.push_back(w);
            }
        }
        for (std::size_t a = 1; a < clique.size(); ++a) {
            for (std::size_t b = a + 1; b < clique.size(); ++b) {
                if (!inst.adjacent(clique[a], clique[b])) {
                    return std::nullopt;
                }
            }
        }
        std::sort(clique.begin(), clique.end());
        candidates.push_back(std::move(clique));
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool maximal = true;
        for (std::size_t j = 0; j < candidates.size() && maximal; ++j) {
            if (i == j) {
                continue;
            }
            const auto& a = candidates[i];
            const auto& b = candidates[j];
            const bool inside = std::includes(b.begin(), b.end(), a.begin(), a.end());
            // Equal candidates: keep the first.
            maximal = !(inside && (b.size() > a.size() || j < i));
        }
        if (maximal) {
            td.bags.push_back(candidates[i]);
        }
    }
    // Maximum-weight spanning tree on intersection sizes (Prim).
    const std::size_t m = td.bags.size();
    std::vector<bool> in_tree(m, false);
    std::vector<long> best(m, -1);
    std::vector<std::size_t> link(m, 0);
    best[0] = 0;
    for (std::size_t step = 0; step < m; ++step) {
        std::size_t pick = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (!in_tree[i] && (pick == m || best[i] > best[pick])) {
                pick = i;
            }
        }
        in_tree[pick] = true;
        if (step > 0) {
            td.edges.emplace_back(link[pick], pick);
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (in_tree[i]) {
                continue;
            }
            std::vector<Vertex> common;
            std::set_intersection(td.bags[pick].begin(), td.bags[pick].end(), td.bags[i].begin(), td.bags[i].end(),
                                  std::back_inserter(common));
            if (static_cast<long>(common.size()) > best[i]) {
                best[i] = static_cast<long>(common.size());
                link[i] = pick;
            }
        }
    }
    return td;
}

} // namespace fkd
