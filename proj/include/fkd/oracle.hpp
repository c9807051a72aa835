#pragma once

// Exhaustive enumeration of partial k-colorings. Exponential; used as ground
// truth for the dynamic programs on small instances.

#include "fkd/error.hpp"
#include "fkd/instance.hpp"
#include "fkd/profile_set.hpp"
#include "fkd/solution.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace fkd {

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

namespace detail {

inline void check_enumeration_cap(const Instance& inst, std::uint64_t cap)
{
    const double size = std::pow(static_cast<double>(inst.k() + 1), static_cast<double>(inst.n()));
    if (size > static_cast<double>(cap)) {
        throw ResourceLimit("brute force needs (k+1)^n = " + std::to_string(inst.k() + 1) + "^" +
                            std::to_string(inst.n()) + " assignments, cap is " + std::to_string(cap));
    }
}

/// Visits every assignment vector (0 = unassigned) that induces a partial
/// k-coloring, in mixed-radix order with vertex 0 most significant. Branches
/// that put two adjacent vertices into the same class are cut immediately.
inline void for_each_coloring(const Instance& inst,
                              const std::function<void(const std::vector<std::size_t>&, const Profile&)>& visit)
{
    const std::size_t n = inst.n();
    const std::size_t k = inst.k();
    std::vector<std::size_t> color(n, 0);
    Profile q(k, 0);
    std::function<void(Vertex)> rec = [&](Vertex v) {
        if (v == n) {
            visit(color, q);
            return;
        }
        for (std::size_t c = 0; c <= k; ++c) {
            if (c != 0) {
                bool clash = false;
                for (Vertex w : inst.neighbors(v)) {
                    if (w < v && color[w] == c) {
                        clash = true;
                        break;
                    }
                }
                if (clash) {
                    continue;
                }
                q[c - 1] += inst.profit(c - 1, v);
            }
            color[v] = c;
            rec(v + 1);
            color[v] = 0;
            if (c != 0) {
                q[c - 1] -= inst.profit(c - 1, v);
            }
        }
    };
    rec(0);
}

} // namespace detail

/// The set of profiles of all partial k-colorings of `inst`.
inline ProfileSet brute_force_profiles(const Instance& inst, std::uint64_t cap = kDefaultEnumerationCap,
                                       std::size_t profile_cap = kDefaultProfileCap)
{
    detail::check_enumeration_cap(inst, cap);
    ProfileSet out(inst.k(), profile_cap);
    detail::for_each_coloring(inst, [&](const std::vector<std::size_t>&, const Profile& q) { out.insert(q); });
    return out;
}

/// Maximum satisfaction level with the first optimal coloring in enumeration
/// order as witness.
inline Solution brute_force_optimum(const Instance& inst, std::uint64_t cap = kDefaultEnumerationCap)
{
    detail::check_enumeration_cap(inst, cap);
    Solution sol;
    sol.method = "brute";
    sol.optimum = -1;
    detail::for_each_coloring(inst, [&](const std::vector<std::size_t>& color, const Profile& q) {
        ++sol.stats.dp_cells;
        const Profit value = satisfaction_level(q);
        if (value > sol.optimum) {
            sol.optimum = value;
            sol.profile = q;
            sol.witness = Coloring::from_assignment(color, inst.k());
        }
    });
    certify(inst, sol);
    return sol;
}

} // namespace fkd
