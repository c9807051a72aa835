#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace fkd;
using namespace fkd::testing;

namespace {

/// A random valid decomposition: the k-tree bags or a path decomposition
/// along a random order.
TreeDecomposition random_decomposition(const Instance& inst, const TreeDecomposition& natural, SplitMix64& rng)
{
    if (rng.chance(1, 2)) {
        return natural;
    }
    std::vector<Vertex> order(inst.n());
    std::iota(order.begin(), order.end(), Vertex{0});
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    return path_decomposition(inst, order);
}

} // namespace

TEST(TinSolver, PathExample)
{
    const auto inst = uniform_instance(3, {{0, 1}, {1, 2}}, 2);
    const auto td = parse_tree_decomposition("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
    const auto res = solve_tin(inst, td);
    EXPECT_EQ(res.solution.optimum, 1);
    EXPECT_EQ(res.solution.optimum, brute_force_optimum(inst).optimum);
}

TEST(TinSolver, CliqueSingleBag)
{
    std::vector<Edge> edges;
    for (Vertex u = 0; u < 4; ++u) {
        for (Vertex v = u + 1; v < 4; ++v) {
            edges.emplace_back(u, v);
        }
    }
    const Instance k4(4, edges, {{4, 3, 2, 1}, {4, 3, 2, 1}});
    EXPECT_EQ(solve_tin(k4, trivial_decomposition(4)).solution.optimum, 3);
    EXPECT_EQ(brute_force_optimum(k4).optimum, 3);
}

TEST(TinSolver, ChordalDiamond)
{
    const auto inst = uniform_instance(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}, 2);
    const auto td = clique_tree_of_chordal(inst);
    ASSERT_TRUE(td);
    EXPECT_EQ(solve_tin(inst, *td).solution.optimum, brute_force_optimum(inst).optimum);
}

TEST(TinSolver, RejectsInvalidDecomposition)
{
    const auto inst = uniform_instance(3, {{0, 1}, {1, 2}}, 1);
    EXPECT_THROW(solve_tin(inst, parse_tree_decomposition("s td 2 2 3\nb 1 1 2\nb 2 3\n1 2\n")), InvalidInput);
}

TEST(TinNode, IntroduceForgetJoin)
{
    const Instance one(1, {}, {{5}});
    NiceTreeDecomposition nice;
    nice.nodes.push_back(NiceNode{});
    nice.nodes.push_back(NiceNode{NiceNode::Kind::Introduce, 0, {0}, 0, 0});
    nice.nodes.push_back(NiceNode{NiceNode::Kind::Join, 0, {0}, 1, 1});
    nice.nodes.push_back(NiceNode{NiceNode::Kind::Forget, 0, {}, 2, 0});
    std::vector<TinTable> tables;
    for (std::size_t x = 0; x < nice.nodes.size(); ++x) {
        tables.push_back(tin_dp_node(one, nice, x, tables));
    }
    EXPECT_EQ(tables[0].at(""), ProfileSet::zero(1));
    EXPECT_EQ(tables[1].size(), 2u);
    EXPECT_EQ(tables[1].at(bag_key({0})), ProfileSet::of(1, {{0}}));
    EXPECT_EQ(tables[1].at(bag_key({1})), ProfileSet::of(1, {{5}}));
    // Join of two copies: (5) + (5) - w = (5).
    EXPECT_EQ(tables[2].at(bag_key({1})), ProfileSet::of(1, {{5}}));
    EXPECT_EQ(tables[3].at(""), ProfileSet::of(1, {{0}, {5}}));
}

TEST(TinProperty, NodeTablesAreExact)
{
    for (std::uint64_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t n = 1 + rng.below(8);
        const std::size_t width = rng.below(std::min<std::size_t>(n, 3));
        const auto sample = gen_partial_ktree(n, width, 1 + rng.below(2), 4, seed);
        const auto& inst = sample.instance;
        const TinDp dp(inst, make_nice(random_decomposition(inst, sample.decomposition, rng)));
        const auto& nodes = dp.nice().nodes;
        std::vector<std::vector<Vertex>> below(nodes.size());
        for (std::size_t x = 0; x < nodes.size(); ++x) {
            std::set<Vertex> s(nodes[x].bag.begin(), nodes[x].bag.end());
            if (nodes[x].kind != NiceNode::Kind::Leaf) {
                s.insert(below[nodes[x].left].begin(), below[nodes[x].left].end());
            }
            if (nodes[x].kind == NiceNode::Kind::Join) {
                s.insert(below[nodes[x].right].begin(), below[nodes[x].right].end());
            }
            below[x].assign(s.begin(), s.end());
            const auto& bag = nodes[x].bag;
            const auto& table = dp.table(x);
            std::size_t nonempty = 0;
            for (const auto& c : enumerate_bag_colorings(inst, bag)) {
                const auto truth = brute_profiles_on(inst, below[x], [&](const std::vector<std::size_t>& color) {
                    for (std::size_t i = 0; i < bag.size(); ++i) {
                        if (color[bag[i]] != c[i]) {
                            return false;
                        }
                    }
                    return true;
                });
                const auto it = table.find(bag_key(c));
                if (truth.empty()) {
                    ASSERT_TRUE(it == table.end());
                    continue;
                }
                ++nonempty;
                ASSERT_TRUE(it != table.end()) << "seed " << seed << " node " << x;
                ASSERT_EQ(it->second, truth) << "seed " << seed << " node " << x;
                if (nodes[x].kind == NiceNode::Kind::Join) {
                    const Profile w = bag_weight(inst, bag, bag_key(c));
                    for (const auto& q : it->second.sorted()) {
                        for (std::size_t j = 0; j < inst.k(); ++j) {
                            ASSERT_GE(q[j], w[j]);
                        }
                    }
                }
            }
            ASSERT_EQ(nonempty, table.size());
        }
    }
}

TEST(TinProperty, SingleBagMatchesOracle)
{
    for (std::uint64_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const auto inst = gen_random_instance(rng.below(8), 1 + rng.below(2), 6, 1, 2, seed);
        EXPECT_EQ(solve_tin(inst, trivial_decomposition(inst.n())).solution.optimum,
                  brute_force_optimum(inst).optimum)
            << "seed " << seed;
    }
}

TEST(TinProperty, ChordalCliqueTreesMatchOracle)
{
    for (std::uint64_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t n = 1 + rng.below(10);
        const std::size_t width = rng.below(std::min<std::size_t>(n, 4));
        const auto sample = gen_partial_ktree(n, width, 1 + rng.below(2), 5, seed, 0, 1);
        const auto td = clique_tree_of_chordal(sample.instance);
        ASSERT_TRUE(td);
        const auto res = solve_tin(sample.instance, *td);
        ASSERT_EQ(res.profiles, brute_force_profiles(sample.instance)) << "seed " << seed;
    }
}

TEST(TinProperty, PruningKeepsOptimum)
{
    for (std::uint64_t seed = 0; seed < kPropertyCases; ++seed) {
        const auto sample = gen_partial_ktree(9, 2, 2, 6, seed);
        SolveOptions pruned;
        pruned.prune = true;
        EXPECT_EQ(solve_tin(sample.instance, sample.decomposition, pruned).solution.optimum,
                  brute_force_optimum(sample.instance).optimum);
    }
}
