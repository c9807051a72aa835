#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace fkd;
using namespace fkd::testing;

namespace {

bool consecutive_under(const std::vector<std::size_t>& order, const std::vector<std::vector<std::size_t>>& rows)
{
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        pos[order[i]] = i;
    }
    for (const auto& row : rows) {
        if (row.empty()) {
            continue;
        }
        std::size_t lo = order.size(), hi = 0;
        for (std::size_t c : row) {
            lo = std::min(lo, pos[c]);
            hi = std::max(hi, pos[c]);
        }
        if (hi - lo + 1 != row.size()) {
            return false;
        }
    }
    return true;
}

bool exhaustive_has_order(std::size_t columns, const std::vector<std::vector<std::size_t>>& rows)
{
    std::vector<std::size_t> order(columns);
    std::iota(order.begin(), order.end(), std::size_t{0});
    do {
        if (consecutive_under(order, rows)) {
            return true;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return false;
}

} // namespace

TEST(PqTree, TuckerCycleHasNoOrder)
{
    const std::vector<std::vector<std::size_t>> rows{{0, 1}, {2, 3}, {0, 2}, {1, 3}};
    EXPECT_FALSE(consecutive_ones_order(4, rows));
    EXPECT_FALSE(exhaustive_has_order(4, rows));
}

TEST(PqTree, ChainHasOrder)
{
    const std::vector<std::vector<std::size_t>> rows{{0, 2}, {2, 4}, {4, 1}, {1, 3}};
    const auto order = consecutive_ones_order(5, rows);
    ASSERT_TRUE(order);
    EXPECT_TRUE(consecutive_under(*order, rows));
}

TEST(PqTree, FullStar)
{
    const auto order = consecutive_ones_order(3, {{0, 1, 2}});
    ASSERT_TRUE(order);
    EXPECT_EQ(order->size(), 3u);
}

TEST(PqTreeProperty, AgreesWithExhaustiveSearch)
{
    for (std::size_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const std::size_t columns = 1 + rng.below(7);
        const std::size_t count = rng.below(7);
        std::vector<std::vector<std::size_t>> rows;
        // Half the cases plant a consecutive structure under a hidden order.
        std::vector<std::size_t> hidden(columns);
        std::iota(hidden.begin(), hidden.end(), std::size_t{0});
        for (std::size_t i = columns; i > 1; --i) {
            std::swap(hidden[i - 1], hidden[rng.below(i)]);
        }
        const bool planted = seed % 2 == 0;
        for (std::size_t r = 0; r < count; ++r) {
            std::vector<std::size_t> row;
            if (planted) {
                const std::size_t lo = rng.below(columns);
                const std::size_t hi = lo + rng.below(columns - lo);
                for (std::size_t i = lo; i <= hi; ++i) {
                    row.push_back(hidden[i]);
                }
            } else {
                for (std::size_t c = 0; c < columns; ++c) {
                    if (rng.chance(1, 2)) {
                        row.push_back(c);
                    }
                }
            }
            rows.push_back(row);
        }
        const auto order = consecutive_ones_order(columns, rows);
        const bool expected = exhaustive_has_order(columns, rows);
        ASSERT_EQ(order.has_value(), expected) << "seed " << seed;
        if (order) {
            std::vector<std::size_t> sorted = *order;
            std::sort(sorted.begin(), sorted.end());
            std::vector<std::size_t> all(columns);
            std::iota(all.begin(), all.end(), std::size_t{0});
            EXPECT_EQ(sorted, all);
            EXPECT_TRUE(consecutive_under(*order, rows)) << "seed " << seed;
        }
    }
}
