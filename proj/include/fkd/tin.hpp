#pragma once

// Fair division over a tree decomposition whose bags contain few
// pairwise non-adjacent vertices.
//
// P(t, c) holds the profiles of partial colorings of G[V_t] that agree with
// the bag coloring c on B_t. Bag colorings are keyed by a string with one
// character per bag vertex (its class, 0 = uncolored).

#include "fkd/error.hpp"
#include "fkd/instance.hpp"
#include "fkd/profile_set.hpp"
#include "fkd/solution.hpp"
#include "fkd/tree_decomposition.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

namespace fkd {

using TinTable = std::unordered_map<std::string, ProfileSet>;

inline std::string bag_key(const std::vector<std::size_t>& colors)
{
    std::string key(colors.size(), '\0');
    for (std::size_t i = 0; i < colors.size(); ++i) {
        key[i] = static_cast<char>(colors[i]);
    }
    return key;
}

/// Profit of the bag vertices to the classes c puts them in.
inline Profile bag_weight(const Instance& inst, const std::vector<Vertex>& bag, const std::string& key)
{
    Profile w(inst.k(), 0);
    for (std::size_t i = 0; i < bag.size(); ++i) {
        const auto c = static_cast<std::size_t>(key[i]);
        if (c != 0) {
            w[c - 1] += inst.profit(c - 1, bag[i]);
        }
    }
    return w;
}

/// One node of the recurrence; `tables` holds the finished child tables.
inline TinTable tin_dp_node(const Instance& inst, const NiceTreeDecomposition& nice, std::size_t x,
                            const std::vector<TinTable>& tables, const SolveOptions& options = {},
                            SolveStats* stats = nullptr)
{
    const std::size_t k = inst.k();
    const auto& node = nice.nodes[x];
    TinTable out;
    auto store = [&](std::string key, const ProfileSet& set) {
        auto [it, fresh] = out.try_emplace(std::move(key), k, options.profile_cap);
        it->second.absorb(set);
    };
    switch (node.kind) {
    case NiceNode::Kind::Leaf:
        out.emplace(std::string(), ProfileSet::zero(k, options.profile_cap));
        break;
    case NiceNode::Kind::Introduce: {
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(node.bag.begin(), node.bag.end(), node.vertex) - node.bag.begin());
        for (const auto& [child_key, set] : tables[node.left]) {
            for (std::size_t c = 0; c <= k; ++c) {
                bool legal = true;
                for (std::size_t i = 0; i < node.bag.size() && legal && c != 0; ++i) {
                    if (i == pos) {
                        continue;
                    }
                    const auto other = static_cast<std::size_t>(child_key[i < pos ? i : i - 1]);
                    legal = !(other == c && inst.adjacent(node.bag[i], node.vertex));
                }
                if (!legal) {
                    continue;
                }
                std::string key = child_key;
                key.insert(key.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<char>(c));
                if (c == 0) {
                    out.emplace(std::move(key), set);
                } else {
                    Profile e(k, 0);
                    e[c - 1] = inst.profit(c - 1, node.vertex);
                    out.emplace(std::move(key), shift(set, e));
                }
            }
        }
        break;
    }
    case NiceNode::Kind::Forget: {
        const auto& child_bag = nice.nodes[node.left].bag;
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(child_bag.begin(), child_bag.end(), node.vertex) - child_bag.begin());
        for (const auto& [child_key, set] : tables[node.left]) {
            std::string key = child_key;
            key.erase(key.begin() + static_cast<std::ptrdiff_t>(pos));
            store(std::move(key), set);
        }
        break;
    }
    case NiceNode::Kind::Join: {
        const auto& right = tables[node.right];
        for (const auto& [key, left_set] : tables[node.left]) {
            const auto it = right.find(key);
            if (it == right.end()) {
                continue;
            }
            if (stats) {
                stats->combine_work += left_set.size() * it->second.size();
            }
            Profile w = bag_weight(inst, node.bag, key);
            for (auto& value : w) {
                value = -value;
            }
            out.emplace(key, shift(merge_profile_sets(left_set, it->second), w));
        }
        break;
    }
    }
    if (options.prune) {
        for (auto& [key, set] : out) {
            set = dominance_prune(set);
        }
    }
    return out;
}

class TinDp {
public:
    TinDp(const Instance& inst, NiceTreeDecomposition nice, SolveOptions options = {})
        : inst_(inst), nice_(std::move(nice)), options_(options)
    {
        if (auto err = check_nice(nice_)) {
            throw std::invalid_argument("TinDp: " + *err);
        }
        tables_.reserve(nice_.nodes.size());
        for (std::size_t x = 0; x < nice_.nodes.size(); ++x) {
            tables_.push_back(tin_dp_node(inst_, nice_, x, tables_, options_, &stats_));
            stats_.dp_cells += tables_.back().size();
            for (const auto& [key, set] : tables_.back()) {
                stats_.profiles_stored += set.size();
            }
        }
        const auto& root = tables_.back();
        const auto it = root.find(std::string());
        profiles_ = it == root.end() ? ProfileSet(inst.k(), options_.profile_cap) : it->second;
    }

    const ProfileSet& profiles() const { return profiles_; }
    const SolveStats& stats() const { return stats_; }
    const NiceTreeDecomposition& nice() const { return nice_; }
    const TinTable& table(std::size_t node) const { return tables_[node]; }

    Coloring witness(const Profile& target) const
    {
        const std::size_t k = inst_.k();
        if (!profiles_.contains(target)) {
            throw std::invalid_argument("TinDp::witness: profile is not attainable");
        }
        std::vector<std::size_t> color(inst_.n(), 0);
        struct Job {
            std::size_t node;
            std::string key;
            Profile q;
        };
        std::vector<Job> todo{{nice_.root(), std::string(), target}};
        while (!todo.empty()) {
            Job job = std::move(todo.back());
            todo.pop_back();
            const auto& node = nice_.nodes[job.node];
            switch (node.kind) {
            case NiceNode::Kind::Leaf:
                break;
            case NiceNode::Kind::Introduce: {
                const auto pos = static_cast<std::size_t>(
                    std::lower_bound(node.bag.begin(), node.bag.end(), node.vertex) - node.bag.begin());
                const auto c = static_cast<std::size_t>(job.key[pos]);
                color[node.vertex] = c;
                job.key.erase(job.key.begin() + static_cast<std::ptrdiff_t>(pos));
                if (c != 0) {
                    job.q[c - 1] -= inst_.profit(c - 1, node.vertex);
                }
                todo.push_back({node.left, std::move(job.key), std::move(job.q)});
                break;
            }
            case NiceNode::Kind::Forget: {
                const auto& child_bag = nice_.nodes[node.left].bag;
                const auto pos = static_cast<std::size_t>(
                    std::lower_bound(child_bag.begin(), child_bag.end(), node.vertex) - child_bag.begin());
                bool found = false;
                for (std::size_t c = 0; c <= k && !found; ++c) {
                    std::string key = job.key;
                    key.insert(key.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<char>(c));
                    const auto it = tables_[node.left].find(key);
                    if (it != tables_[node.left].end() && it->second.contains(job.q)) {
                        todo.push_back({node.left, std::move(key), job.q});
                        found = true;
                    }
                }
                if (!found) {
                    throw std::logic_error("TinDp::witness: forget step has no extension");
                }
                break;
            }
            case NiceNode::Kind::Join: {
                const Profile w = bag_weight(inst_, node.bag, job.key);
                const auto& left = tables_[node.left].at(job.key);
                const auto& right = tables_[node.right].at(job.key);
                bool found = false;
                Profile rest(k);
                for (std::size_t i = 0; i < left.size() && !found; ++i) {
                    const auto q1 = left[i];
                    for (std::size_t j = 0; j < k; ++j) {
                        rest[j] = job.q[j] - q1[j] + w[j];
                    }
                    if (right.contains(rest)) {
                        todo.push_back({node.left, job.key, left.at(i)});
                        todo.push_back({node.right, job.key, rest});
                        found = true;
                    }
                }
                if (!found) {
                    throw std::logic_error("TinDp::witness: join step has no split");
                }
                break;
            }
            }
        }
        return Coloring::from_assignment(color, k);
    }

private:
    const Instance& inst_;
    NiceTreeDecomposition nice_;
    SolveOptions options_;
    std::vector<TinTable> tables_;
    ProfileSet profiles_;
    SolveStats stats_;
};

/// Validates `td` against the instance, converts it to nice form and solves.
inline ExactResult solve_tin(const Instance& inst, const TreeDecomposition& td, SolveOptions options = {})
{
    validate_td(inst, td);
    TinDp dp(inst, make_nice(td), options);
    ExactResult out{dp.profiles(), {}};
    Solution& sol = out.solution;
    sol.method = "tin";
    sol.profile = best_profile(out.profiles);
    sol.optimum = satisfaction_level(sol.profile);
    sol.witness = dp.witness(sol.profile);
    sol.stats = dp.stats();
    certify(inst, sol);
    return out;
}

} // namespace fkd
