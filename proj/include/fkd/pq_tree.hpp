#pragma once

// Consecutive-ones testing with a PQ-tree. Quadratic rather than the
// linear-time bookkeeping: every reduction relabels the whole tree.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

namespace fkd {

class PQTree {
public:
    /// A tree over `leaves` elements 0..leaves-1 that admits every order.
    explicit PQTree(std::size_t leaves) : leaves_(leaves)
    {
        for (std::size_t i = 0; i < leaves; ++i) {
            nodes_.push_back(Node{Kind::Leaf, {}, i});
        }
        if (leaves == 1) {
            root_ = 0;
        } else if (leaves > 1) {
            std::vector<std::size_t> kids(leaves);
            for (std::size_t i = 0; i < leaves; ++i) {
                kids[i] = i;
            }
            root_ = make(Kind::P, std::move(kids));
        }
    }

    /// Restricts the admissible orders to those where `set` is consecutive.
    /// Returns false (and leaves the tree unusable) when no order remains.
    bool reduce(const std::vector<std::size_t>& set)
    {
        if (failed_) {
            return false;
        }
        if (set.size() <= 1 || leaves_ <= 1) {
            return true;
        }
        in_set_.assign(leaves_, false);
        for (std::size_t x : set) {
            in_set_[x] = true;
        }
        target_ = set.size();
        full_count_.assign(nodes_.size(), 0);
        leaf_count_.assign(nodes_.size(), 0);
        count(root_);
        std::size_t pertinent = root_;
        // Descend to the deepest node holding every element of the set.
        for (bool moved = true; moved;) {
            moved = false;
            for (std::size_t c : nodes_[pertinent].children) {
                if (full_count_[c] == target_) {
                    pertinent = c;
                    moved = true;
                    break;
                }
            }
        }
        auto replaced = process_root(pertinent);
        if (!replaced) {
            failed_ = true;
            return false;
        }
        replace(pertinent, *replaced);
        return true;
    }

    /// Leaves left to right in one admissible order.
    std::vector<std::size_t> frontier() const
    {
        std::vector<std::size_t> out;
        if (leaves_ == 0) {
            return out;
        }
        std::vector<std::size_t> stack{root_};
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            if (nodes_[x].kind == Kind::Leaf) {
                out.push_back(nodes_[x].leaf);
                continue;
            }
            const auto& kids = nodes_[x].children;
            for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
                stack.push_back(*it);
            }
        }
        return out;
    }

private:
    enum class Kind { Leaf, P, Q };
    enum class Label { Empty, Partial, Full };

    struct Node {
        Kind kind;
        std::vector<std::size_t> children;
        std::size_t leaf = 0;
    };

    std::size_t make(Kind kind, std::vector<std::size_t> children)
    {
        nodes_.push_back(Node{kind, std::move(children), 0});
        full_count_.push_back(0);
        leaf_count_.push_back(0);
        return nodes_.size() - 1;
    }

    void count(std::size_t x)
    {
        if (nodes_[x].kind == Kind::Leaf) {
            leaf_count_[x] = 1;
            full_count_[x] = in_set_[nodes_[x].leaf] ? 1 : 0;
            return;
        }
        std::size_t leaves = 0, full = 0;
        for (std::size_t c : nodes_[x].children) {
            count(c);
            leaves += leaf_count_[c];
            full += full_count_[c];
        }
        leaf_count_[x] = leaves;
        full_count_[x] = full;
    }

    Label label(std::size_t x) const
    {
        if (full_count_[x] == 0) {
            return Label::Empty;
        }
        return full_count_[x] == leaf_count_[x] ? Label::Full : Label::Partial;
    }

    /// Groups several siblings under one P-node (or returns the single one).
    std::size_t group(std::vector<std::size_t> xs)
    {
        if (xs.size() == 1) {
            return xs.front();
        }
        const std::size_t id = make(Kind::P, std::move(xs));
        return id;
    }

    /// For a partial node below the pertinent root: an ordered child
    /// sequence with empty children first and full children last.
    std::optional<std::vector<std::size_t>> singly_partial(std::size_t x)
    {
        const Node node = nodes_[x];
        if (node.kind == Kind::P) {
            std::vector<std::size_t> empty, full, partial;
            for (std::size_t c : node.children) {
                switch (label(c)) {
                case Label::Empty: empty.push_back(c); break;
                case Label::Full: full.push_back(c); break;
                case Label::Partial: partial.push_back(c); break;
                }
            }
            if (partial.size() > 1) {
                return std::nullopt;
            }
            std::vector<std::size_t> seq;
            if (!empty.empty()) {
                seq.push_back(group(empty));
            }
            if (!partial.empty()) {
                auto inner = singly_partial(partial.front());
                if (!inner) {
                    return std::nullopt;
                }
                seq.insert(seq.end(), inner->begin(), inner->end());
            }
            if (!full.empty()) {
                const std::size_t g = group(full);
                mark_full(g);
                seq.push_back(g);
            }
            return seq;
        }
        // Q-node: children must read E* [P] F* or its reverse.
        std::vector<std::size_t> kids = node.children;
        if (!reads_empty_partial_full(kids)) {
            std::reverse(kids.begin(), kids.end());
            if (!reads_empty_partial_full(kids)) {
                return std::nullopt;
            }
        }
        std::vector<std::size_t> seq;
        for (std::size_t c : kids) {
            if (label(c) != Label::Partial) {
                seq.push_back(c);
                continue;
            }
            auto inner = singly_partial(c);
            if (!inner) {
                return std::nullopt;
            }
            seq.insert(seq.end(), inner->begin(), inner->end());
        }
        return seq;
    }

    bool reads_empty_partial_full(const std::vector<std::size_t>& kids) const
    {
        std::size_t i = 0;
        while (i < kids.size() && label(kids[i]) == Label::Empty) {
            ++i;
        }
        if (i < kids.size() && label(kids[i]) == Label::Partial) {
            ++i;
        }
        while (i < kids.size() && label(kids[i]) == Label::Full) {
            ++i;
        }
        return i == kids.size();
    }

    void mark_full(std::size_t x)
    {
        full_count_[x] = 0;
        leaf_count_[x] = 0;
        for (std::size_t c : nodes_[x].children) {
            full_count_[x] += full_count_[c];
            leaf_count_[x] += leaf_count_[c];
        }
    }

    static std::vector<std::size_t> reversed(std::vector<std::size_t> v)
    {
        std::reverse(v.begin(), v.end());
        return v;
    }

    /// Rebuilds the pertinent root; returns the id of its replacement.
    std::optional<std::size_t> process_root(std::size_t x)
    {
        const Node node = nodes_[x];
        if (node.kind == Kind::Leaf || label(x) == Label::Full) {
            return x;
        }
        if (node.kind == Kind::P) {
            std::vector<std::size_t> empty, full, partial;
            for (std::size_t c : node.children) {
                switch (label(c)) {
                case Label::Empty: empty.push_back(c); break;
                case Label::Full: full.push_back(c); break;
                case Label::Partial: partial.push_back(c); break;
                }
            }
            if (partial.size() > 2) {
                return std::nullopt;
            }
            std::size_t core;
            if (partial.empty()) {
                core = group(full);
            } else {
                std::vector<std::size_t> seq;
                auto left = singly_partial(partial[0]);
                if (!left) {
                    return std::nullopt;
                }
                seq = *left;
                if (!full.empty()) {
                    const std::size_t g = group(full);
                    mark_full(g);
                    seq.push_back(g);
                }
                if (partial.size() == 2) {
                    auto right = singly_partial(partial[1]);
                    if (!right) {
                        return std::nullopt;
                    }
                    const auto r = reversed(*right);
                    seq.insert(seq.end(), r.begin(), r.end());
                }
                core = make(Kind::Q, std::move(seq));
            }
            if (empty.empty()) {
                return core;
            }
            empty.push_back(core);
            return make(Kind::P, std::move(empty));
        }
        // Q-node root: E* [P] F+ [P] E* after expanding partial children.
        const auto& kids = node.children;
        std::size_t first = kids.size(), last = 0;
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (label(kids[i]) != Label::Empty) {
                first = std::min(first, i);
                last = i;
            }
        }
        for (std::size_t i = first + 1; i < last; ++i) {
            if (label(kids[i]) != Label::Full) {
                return std::nullopt;
            }
        }
        std::vector<std::size_t> seq(kids.begin(), kids.begin() + static_cast<std::ptrdiff_t>(first));
        for (std::size_t i = first; i <= last; ++i) {
            if (label(kids[i]) != Label::Partial) {
                seq.push_back(kids[i]);
                continue;
            }
            auto inner = singly_partial(kids[i]);
            if (!inner) {
                return std::nullopt;
            }
            // The full end of the expanded child faces the full run.
            if (i == first) {
                seq.insert(seq.end(), inner->begin(), inner->end());
            } else {
                const auto r = reversed(*inner);
                seq.insert(seq.end(), r.begin(), r.end());
            }
        }
        seq.insert(seq.end(), kids.begin() + static_cast<std::ptrdiff_t>(last) + 1, kids.end());
        return make(Kind::Q, std::move(seq));
    }

    /// Points the live parent of `old_id` at `new_id`.
    void replace(std::size_t old_id, std::size_t new_id)
    {
        if (old_id == new_id) {
            return;
        }
        if (old_id == root_) {
            root_ = new_id;
            return;
        }
        std::vector<std::size_t> stack{root_};
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            for (auto& c : nodes_[x].children) {
                if (c == old_id) {
                    c = new_id;
                    return;
                }
                stack.push_back(c);
            }
        }
    }

    std::size_t leaves_;
    std::size_t root_ = 0;
    bool failed_ = false;
    std::vector<Node> nodes_;
    std::vector<bool> in_set_;
    std::size_t target_ = 0;
    std::vector<std::size_t> full_count_;
    std::vector<std::size_t> leaf_count_;
};

/// A column order in which every row's columns are consecutive, or nullopt.
inline std::optional<std::vector<std::size_t>>
consecutive_ones_order(std::size_t columns, const std::vector<std::vector<std::size_t>>& rows)
{
    PQTree tree(columns);
    for (const auto& row : rows) {
        if (!tree.reduce(row)) {
            return std::nullopt;
        }
    }
    return tree.frontier();
}

} // namespace fkd
