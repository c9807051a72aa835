#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace fkd;
using namespace fkd::testing;

TEST(Oracle, SingleEdge)
{
    const Instance inst(2, {{0, 1}}, {{3, 1}});
    EXPECT_EQ(brute_force_profiles(inst), ProfileSet::of(1, {{0}, {3}, {1}}));
}

TEST(Oracle, EdgelessMatchesEdgeless)
{
    EXPECT_EQ(brute_force_profiles(t1()), edgeless_profiles(t1(), {0, 1}));
    EXPECT_EQ(brute_force_optimum(t1()).optimum, 2);
}

TEST(Oracle, Triangle)
{
    const Instance k3(3, {{0, 1}, {0, 2}, {1, 2}}, {{5, 4, 3}, {5, 4, 3}});
    const auto all = brute_force_profiles(k3);
    EXPECT_TRUE(all.contains(Profile{5, 4}));
    EXPECT_FALSE(all.contains(Profile{9, 0}));
    EXPECT_FALSE(all.contains(Profile{5, 5}));
    const auto best = brute_force_optimum(k3);
    EXPECT_EQ(best.optimum, 4);
    EXPECT_FALSE(validate_coloring(k3, best.witness));
}

TEST(Oracle, PathUnit)
{
    const auto sol = brute_force_optimum(path4_unit());
    EXPECT_EQ(sol.optimum, 2);
    EXPECT_EQ(sol.profile, (Profile{2, 2}));
}

TEST(Oracle, MoreAgentsThanItems)
{
    EXPECT_EQ(brute_force_optimum(uniform_instance(2, {}, 3, 5)).optimum, 0);
}

TEST(Oracle, Cap)
{
    EXPECT_THROW(brute_force_profiles(uniform_instance(20, {}, 2), 1000), ResourceLimit);
}

TEST(OracleProperty, WitnessValidates)
{
    for (std::size_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const auto inst = gen_random_instance(rng.below(8), 1 + rng.below(3), 9, 1, 2, seed);
        const auto sol = brute_force_optimum(inst);
        EXPECT_FALSE(validate_coloring(inst, sol.witness));
        EXPECT_EQ(sol.optimum, best_satisfaction(brute_force_profiles(inst)));
    }
}

TEST(OracleProperty, MisCrossCheck)
{
    for (std::size_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const auto inst = gen_random_instance(rng.below(10), 1, 15, 1, 2, seed);
        EXPECT_EQ(brute_force_profiles(inst).upper_bound()[0], mis_oracle(inst)) << "seed " << seed;
    }
}

TEST(OracleProperty, AddingAnEdgeShrinks)
{
    for (std::size_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t n = 2 + rng.below(6);
        const auto inst = gen_random_instance(n, 1 + rng.below(2), 6, 1, 3, seed);
        Vertex u = rng.below(n), v = rng.below(n - 1);
        if (v >= u) {
            ++v;
        }
        if (inst.adjacent(u, v)) {
            continue;
        }
        auto edges = inst.edges();
        edges.emplace_back(std::min(u, v), std::max(u, v));
        const Instance more(n, edges, inst.profits());
        const auto small = brute_force_profiles(more);
        const auto big = brute_force_profiles(inst);
        for (const auto& q : small.sorted()) {
            EXPECT_TRUE(big.contains(q));
        }
    }
}
