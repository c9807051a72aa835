#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace fkd;
using namespace fkd::testing;

TEST(ProfileSet, EdgelessExamples)
{
    EXPECT_EQ(edgeless_profiles({{5}, {3}}), ProfileSet::of(2, {{0, 0}, {5, 0}, {0, 3}}));
    EXPECT_EQ(edgeless_profiles(std::vector<std::vector<Profit>>{{}, {}}), ProfileSet::zero(2));
    const auto t = edgeless_profiles(t1(), {0, 1});
    EXPECT_EQ(t, ProfileSet::of(2, {{0, 0}, {1, 0}, {3, 0}, {4, 0}, {0, 2}, {0, 4}, {1, 2}, {3, 2}}));
    EXPECT_EQ(best_satisfaction(t), 2);
    EXPECT_EQ(best_profile(t), (Profile{3, 2}));
}

TEST(ProfileSet, Merge)
{
    const auto s = ProfileSet::of(2, {{1, 0}, {0, 1}});
    EXPECT_EQ(merge_profile_sets(ProfileSet::zero(2), s), s);
    EXPECT_EQ(merge_profile_sets(s, s), ProfileSet::of(2, {{2, 0}, {1, 1}, {0, 2}}));
    EXPECT_THROW(merge_profile_sets(s, ProfileSet::zero(3)), std::invalid_argument);
}

TEST(ProfileSet, Shift)
{
    EXPECT_EQ(shift(ProfileSet::zero(2), {2, 3}), ProfileSet::of(2, {{2, 3}}));
    const auto s = ProfileSet::of(2, {{1, 0}, {0, 1}});
    EXPECT_EQ(shift(s, {0, 0}), s);
    EXPECT_EQ(shift(s, {1, 1}), ProfileSet::of(2, {{2, 1}, {1, 2}}));
}

TEST(ProfileSet, BestSatisfaction)
{
    EXPECT_EQ(best_satisfaction(ProfileSet::zero(2)), 0);
    EXPECT_EQ(best_satisfaction(ProfileSet::of(2, {{5, 1}, {3, 3}, {1, 5}})), 3);
    EXPECT_THROW(best_satisfaction(ProfileSet(2)), std::invalid_argument);
}

TEST(ProfileSet, DominancePrune)
{
    EXPECT_EQ(dominance_prune(ProfileSet::of(2, {{1, 1}, {2, 2}})), ProfileSet::of(2, {{2, 2}}));
    const auto anti = ProfileSet::of(2, {{5, 1}, {3, 3}, {1, 5}});
    EXPECT_EQ(dominance_prune(anti), anti);
    EXPECT_EQ(dominance_prune(edgeless_profiles(t1(), {0, 1})), ProfileSet::of(2, {{4, 0}, {3, 2}, {0, 4}}));
}

TEST(ProfileSet, DumpIsSortedAndParses)
{
    const auto s = ProfileSet::of(2, {{3, 0}, {0, 2}, {1, 1}});
    EXPECT_EQ(dump_profiles(s), "0 2\n1 1\n3 0\n");
    EXPECT_EQ(parse_profiles(dump_profiles(s), 2), s);
}

TEST(ProfileSet, CapIsEnforced)
{
    ProfileSet s(1, 2);
    s.insert(Profile{0});
    s.insert(Profile{1});
    EXPECT_FALSE(s.insert(Profile{1}));
    EXPECT_THROW(s.insert(Profile{2}), ResourceLimit);
}

TEST(ProfileSet, EdgelessAssignmentRealizesTarget)
{
    const std::vector<std::vector<Profit>> p{{3, 1, 4}, {2, 2, 0}};
    const auto all = edgeless_profiles(p);
    for (const auto& q : all.sorted()) {
        const auto a = edgeless_assignment(p, q);
        ASSERT_TRUE(a);
        Profile got(2, 0);
        for (std::size_t i = 0; i < a->size(); ++i) {
            if ((*a)[i]) {
                got[(*a)[i] - 1] += p[(*a)[i] - 1][i];
            }
        }
        EXPECT_EQ(got, q);
    }
    EXPECT_FALSE(edgeless_assignment(p, {100, 0}));
}

namespace {

ProfileSet random_set(SplitMix64& rng, std::size_t k)
{
    ProfileSet s = ProfileSet::zero(k);
    const std::size_t size = rng.below(6);
    for (std::size_t i = 0; i < size; ++i) {
        Profile q(k);
        for (auto& x : q) {
            x = rng.between(0, 6);
        }
        s.insert(q);
    }
    return s;
}

} // namespace

TEST(ProfileSetProperty, EdgelessMatchesBruteForce)
{
    for (std::size_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const auto inst = gen_random_instance(rng.below(9), 1 + rng.below(3), 10, 0, 1, seed);
        std::vector<Vertex> all(inst.n());
        std::iota(all.begin(), all.end(), Vertex{0});
        EXPECT_EQ(edgeless_profiles(inst, all), brute_force_profiles(inst)) << "seed " << seed;
    }
}

TEST(ProfileSetProperty, MergeAlgebra)
{
    for (std::size_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t k = 1 + rng.below(3);
        const auto a = random_set(rng, k), b = random_set(rng, k), c = random_set(rng, k);
        EXPECT_EQ(merge_profile_sets(a, b), merge_profile_sets(b, a));
        EXPECT_EQ(merge_profile_sets(merge_profile_sets(a, b), c), merge_profile_sets(a, merge_profile_sets(b, c)));
        EXPECT_EQ(merge_profile_sets(a, ProfileSet::zero(k)), a);
        EXPECT_GE(best_satisfaction(merge_profile_sets(a, b)), std::max(best_satisfaction(a), best_satisfaction(b)));
    }
}

TEST(ProfileSetProperty, PruneKeepsBestAndFrontier)
{
    for (std::size_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t k = 1 + rng.below(3);
        const auto s = random_set(rng, k);
        const auto p = dominance_prune(s);
        EXPECT_EQ(best_satisfaction(p), best_satisfaction(s));
        for (const auto& q : s.sorted()) {
            bool covered = false;
            for (const auto& r : p.sorted()) {
                bool ge = true;
                for (std::size_t j = 0; j < k; ++j) {
                    ge = ge && r[j] >= q[j];
                }
                covered = covered || ge;
            }
            EXPECT_TRUE(covered);
        }
        for (const auto& a : p.sorted()) {
            for (const auto& b : p.sorted()) {
                bool ge = a != b;
                for (std::size_t j = 0; j < k; ++j) {
                    ge = ge && a[j] >= b[j];
                }
                EXPECT_FALSE(ge) << "pruned set still has a dominated member";
            }
        }
    }
}

TEST(ProfileSetProperty, MembersBoundedByTotals)
{
    for (std::size_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const auto inst = gen_random_instance(rng.below(8), 1 + rng.below(3), 9, 1, 3, seed);
        const auto s = brute_force_profiles(inst);
        const auto totals = inst.totals();
        for (std::size_t j = 0; j < inst.k(); ++j) {
            EXPECT_LE(s.upper_bound()[j], totals[j]);
        }
    }
}
