#pragma once

// Seeded instance generators. Every draw goes through SplitMix64 so a seed
// reproduces the same files on any platform.

#include "fkd/cliquewidth.hpp"
#include "fkd/convex.hpp"
#include "fkd/instance.hpp"
#include "fkd/tree_decomposition.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace fkd {

/// SplitMix64 (Steele, Lea, Flood 2014).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound) by rejection; bound 0 yields 0.
    std::uint64_t below(std::uint64_t bound)
    {
        if (bound == 0) {
            return 0;
        }
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) {
                return x % bound;
            }
        }
    }

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// True with probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

private:
    std::uint64_t state_;
};

/// k rows of n profits uniform in [0, max_profit], row by row.
inline std::vector<std::vector<Profit>> random_profits(SplitMix64& rng, std::size_t n, std::size_t k, Profit max_profit)
{
    std::vector<std::vector<Profit>> p(k, std::vector<Profit>(n));
    for (auto& row : p) {
        for (auto& x : row) {
            x = rng.between(0, max_profit);
        }
    }
    return p;
}

/// Erdos-Renyi style graph: each pair joined with probability num/den.
inline Instance gen_random_instance(std::size_t n, std::size_t k, Profit max_profit, std::uint64_t num,
                                    std::uint64_t den, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) {
            if (rng.chance(num, den)) {
                edges.emplace_back(u, v);
            }
        }
    }
    return Instance(n, std::move(edges), random_profits(rng, n, k, max_profit));
}

struct ConvexSample {
    Instance instance;
    ConvexOrdering ordering;
};

/// A = ids 1..na in order, B = ids na+1..na+nb; each B-vertex gets a
/// uniformly random nonempty interval of A (none when na = 0).
inline ConvexSample gen_convex_bipartite(std::size_t na, std::size_t nb, std::size_t k, Profit max_profit,
                                         std::uint64_t seed)
{
    SplitMix64 rng(seed);
    std::vector<Edge> edges;
    const std::uint64_t intervals = na * (na + 1) / 2;
    for (std::size_t b = 0; b < nb && na > 0; ++b) {
        std::uint64_t pick = rng.below(intervals);
        std::size_t lo = 0;
        // Intervals starting at lo: na - lo of them.
        while (pick >= na - lo) {
            pick -= na - lo;
            ++lo;
        }
        const std::size_t hi = lo + pick;
        for (std::size_t a = lo; a <= hi; ++a) {
            edges.emplace_back(a, na + b);
        }
    }
    Instance inst(na + nb, std::move(edges), random_profits(rng, na + nb, k, max_profit));
    std::vector<Vertex> a(na), bs(nb);
    std::iota(a.begin(), a.end(), Vertex{0});
    std::iota(bs.begin(), bs.end(), na);
    ConvexOrdering co = validate_convex_ordering(inst, a, bs);
    return {std::move(inst), std::move(co)};
}

struct KTreeSample {
    Instance instance;
    TreeDecomposition decomposition;
};

/// Random `width`-tree on n vertices, each edge then deleted with
/// probability del_num/del_den; the construction's bags form the returned
/// decomposition.
inline KTreeSample gen_partial_ktree(std::size_t n, std::size_t width, std::size_t k, Profit max_profit,
                                     std::uint64_t seed, std::uint64_t del_num = 1, std::uint64_t del_den = 3)
{
    if (n > 0 && width >= n) {
        throw InvalidInput("width must be smaller than n");
    }
    SplitMix64 rng(seed);
    TreeDecomposition td;
    td.n = n;
    std::set<Edge> edges;
    if (n > 0) {
        std::vector<Vertex> first(width + 1);
        std::iota(first.begin(), first.end(), Vertex{0});
        td.bags.push_back(first);
        for (Vertex u = 0; u <= width; ++u) {
            for (Vertex v = u + 1; v <= width; ++v) {
                edges.emplace(u, v);
            }
        }
        for (Vertex v = width + 1; v < n; ++v) {
            const std::size_t host = rng.below(td.bags.size());
            std::vector<Vertex> bag = td.bags[host];
            bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(rng.below(bag.size())));
            for (Vertex u : bag) {
                edges.emplace(u, v);
            }
            bag.push_back(v);
            std::sort(bag.begin(), bag.end());
            td.bags.push_back(std::move(bag));
            td.edges.emplace_back(host, td.bags.size() - 1);
        }
    } else {
        td.bags.emplace_back();
    }
    std::vector<Edge> kept;
    for (const auto& e : edges) {
        if (!rng.chance(del_num, del_den)) {
            kept.push_back(e);
        }
    }
    Instance inst(n, std::move(kept), random_profits(rng, n, k, max_profit));
    return {std::move(inst), std::move(td)};
}

/// A linear expression building the instance graph, adding vertices in
/// `order`. Vertices with later neighbors keep private labels; finished
/// ones share label 1.
inline CliqueExpression linear_expression(const Instance& inst, const std::vector<Vertex>& order)
{
    const std::size_t n = inst.n();
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < order.size(); ++i) {
        pos[order[i]] = i;
    }
    std::vector<std::size_t> last(n, 0);
    for (Vertex v = 0; v < n; ++v) {
        last[v] = pos[v];
        for (Vertex w : inst.neighbors(v)) {
            last[v] = std::max(last[v], pos[w]);
        }
    }
    CliqueExpression expr;
    std::vector<std::size_t> label(n, 0);
    std::vector<bool> busy{true, true}; // index 0 unused, label 1 = finished
    std::size_t top = 0;
    auto push = [&](ExprNode node) {
        expr.nodes.push_back(node);
        return expr.nodes.size() - 1;
    };
    std::optional<std::size_t> acc;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Vertex v = order[i];
        std::size_t l = 2;
        while (l < busy.size() && busy[l]) {
            ++l;
        }
        if (l == busy.size()) {
            busy.push_back(false);
        }
        busy[l] = true;
        label[v] = l;
        ExprNode leaf;
        leaf.kind = ExprNode::Kind::Vertex;
        leaf.a = l;
        leaf.vertex = v;
        std::size_t x = push(leaf);
        if (acc) {
            ExprNode u;
            u.kind = ExprNode::Kind::Union;
            u.left = *acc;
            u.right = x;
            x = push(u);
            for (Vertex w : inst.neighbors(v)) {
                if (pos[w] < i) {
                    ExprNode eta;
                    eta.kind = ExprNode::Kind::Eta;
                    eta.a = label[w];
                    eta.b = l;
                    eta.left = x;
                    x = push(eta);
                }
            }
        }
        // Retire vertices whose neighbors are all placed.
        std::vector<Vertex> placed(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i + 1));
        std::sort(placed.begin(), placed.end());
        for (Vertex w : placed) {
            if (label[w] > 1 && last[w] <= i) {
                ExprNode rho;
                rho.kind = ExprNode::Kind::Rho;
                rho.a = label[w];
                rho.b = 1;
                rho.left = x;
                busy[label[w]] = false;
                label[w] = 1;
                x = push(rho);
            }
        }
        acc = x;
        top = std::max(top, busy.size() - 1);
    }
    expr.labels = std::max<std::size_t>(top, 1);
    return expr;
}

/// Path decomposition following `order`: bag i holds order[i] and every
/// earlier vertex with a neighbor at position i or later.
inline TreeDecomposition path_decomposition(const Instance& inst, const std::vector<Vertex>& order)
{
    const std::size_t n = inst.n();
    TreeDecomposition td;
    td.n = n;
    if (n == 0) {
        td.bags.emplace_back();
        return td;
    }
    std::vector<std::size_t> pos(n), last(n);
    for (std::size_t i = 0; i < n; ++i) {
        pos[order[i]] = i;
    }
    for (Vertex v = 0; v < n; ++v) {
        last[v] = pos[v];
        for (Vertex w : inst.neighbors(v)) {
            last[v] = std::max(last[v], pos[w]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Vertex> bag;
        for (std::size_t j = 0; j <= i; ++j) {
            if (j == i || last[order[j]] >= i) {
                bag.push_back(order[j]);
            }
        }
        std::sort(bag.begin(), bag.end());
        td.bags.push_back(std::move(bag));
        if (i > 0) {
            td.edges.emplace_back(i - 1, i);
        }
    }
    return td;
}

struct ExpressionSample {
    Instance instance;
    CliqueExpression expression;
};

/// A random expression with `leaves` vertices over at most `labels` labels,
/// and an instance on the graph it builds.
inline ExpressionSample gen_expression(std::size_t leaves, std::size_t labels, std::size_t k, Profit max_profit,
                                       std::uint64_t seed)
{
    if (labels == 0) {
        throw InvalidInput("an expression needs at least one label");
    }
    SplitMix64 rng(seed);
    CliqueExpression expr;
    expr.labels = labels;
    std::vector<Vertex> ids(leaves);
    std::iota(ids.begin(), ids.end(), Vertex{0});
    for (std::size_t i = leaves; i > 1; --i) {
        std::swap(ids[i - 1], ids[rng.below(i)]);
    }
    auto push = [&](ExprNode node) {
        expr.nodes.push_back(node);
        return expr.nodes.size() - 1;
    };
    auto decorate = [&](std::size_t x) {
        if (labels < 2) {
            return x;
        }
        const std::size_t ops = rng.below(3);
        for (std::size_t o = 0; o < ops; ++o) {
            ExprNode node;
            node.kind = rng.chance(2, 3) ? ExprNode::Kind::Eta : ExprNode::Kind::Rho;
            node.a = 1 + rng.below(labels);
            node.b = 1 + rng.below(labels - 1);
            if (node.b >= node.a) {
                ++node.b;
            }
            node.left = x;
            x = push(node);
        }
        return x;
    };
    std::vector<std::size_t> pool;
    for (Vertex v : ids) {
        ExprNode leaf;
        leaf.kind = ExprNode::Kind::Vertex;
        leaf.a = 1 + rng.below(labels);
        leaf.vertex = v;
        pool.push_back(push(leaf));
    }
    while (pool.size() > 1) {
        const std::size_t i = rng.below(pool.size());
        const std::size_t left = pool[i];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
        const std::size_t j = rng.below(pool.size());
        const std::size_t right = pool[j];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
        ExprNode u;
        u.kind = ExprNode::Kind::Union;
        u.left = left;
        u.right = right;
        pool.push_back(decorate(push(u)));
    }
    const LabeledGraph g = evaluate_expression(expr);
    std::vector<Edge> edges(g.edges.begin(), g.edges.end());
    Instance inst(leaves, std::move(edges), random_profits(rng, leaves, k, max_profit));
    return {std::move(inst), std::move(expr)};
}

} // namespace fkd
