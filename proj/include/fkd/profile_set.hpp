#pragma once

// Deduplicated sets of profit profiles, the state carried by every dynamic
// program in this library.

#include "fkd/error.hpp"
#include "fkd/instance.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkd {

inline constexpr std::size_t kDefaultProfileCap = std::size_t{1} << 26;

/// Hash set of fixed-arity profit tuples stored contiguously.
///
/// Members keep insertion order internally; `sorted()` and the dump format
/// give the canonical lexicographic order. Inserting past `cap()` members
/// throws ResourceLimit.
class ProfileSet {
public:
    explicit ProfileSet(std::size_t arity = 1, std::size_t cap = kDefaultProfileCap)
        : arity_(arity), cap_(cap), upper_(arity, 0)
    {
        if (arity == 0) {
            throw std::invalid_argument("profile arity must be positive");
        }
    }

    /// {(0,...,0)}
    static ProfileSet zero(std::size_t arity, std::size_t cap = kDefaultProfileCap)
    {
        ProfileSet s(arity, cap);
        s.insert(Profile(arity, 0));
        return s;
    }

    static ProfileSet of(std::size_t arity, std::initializer_list<Profile> members,
                         std::size_t cap = kDefaultProfileCap)
    {
        ProfileSet s(arity, cap);
        for (const auto& q : members) {
            s.insert(q);
        }
        return s;
    }

    std::size_t arity() const noexcept { return arity_; }
    std::size_t cap() const noexcept { return cap_; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }

    /// Componentwise maximum over members (all zero when empty).
    const Profile& upper_bound() const noexcept { return upper_; }

    std::span<const Profit> operator[](std::size_t i) const
    {
        return {data_.data() + i * arity_, arity_};
    }

    Profile at(std::size_t i) const
    {
        const auto m = (*this)[i];
        return Profile(m.begin(), m.end());
    }

    void reserve(std::size_t members)
    {
        data_.reserve(members * arity_);
        if (slots_.size() < 2 * members) {
            rehash(next_pow2(2 * members));
        }
    }

    /// Returns true when `q` was not yet present.
    bool insert(std::span<const Profit> q)
    {
        check_arity(q.size());
        if (slots_.empty() || 2 * (count_ + 1) > slots_.size()) {
            rehash(slots_.empty() ? 16 : slots_.size() * 2);
        }
        const std::size_t mask = slots_.size() - 1;
        std::size_t pos = hash(q) & mask;
        while (slots_[pos] != 0) {
            if (equal_at(slots_[pos] - 1, q)) {
                return false;
            }
            pos = (pos + 1) & mask;
        }
        if (count_ >= cap_) {
            throw ResourceLimit("profile set exceeded the cap of " + std::to_string(cap_) +
                                " profiles");
        }
        data_.insert(data_.end(), q.begin(), q.end());
        for (std::size_t j = 0; j < arity_; ++j) {
            upper_[j] = std::max(upper_[j], q[j]);
        }
        slots_[pos] = static_cast<std::uint32_t>(++count_);
        return true;
    }

    bool insert(const Profile& q) { return insert(std::span<const Profit>(q)); }

    bool contains(std::span<const Profit> q) const
    {
        if (q.size() != arity_ || slots_.empty()) {
            return false;
        }
        const std::size_t mask = slots_.size() - 1;
        std::size_t pos = hash(q) & mask;
        while (slots_[pos] != 0) {
            if (equal_at(slots_[pos] - 1, q)) {
                return true;
            }
            pos = (pos + 1) & mask;
        }
        return false;
    }

    bool contains(const Profile& q) const { return contains(std::span<const Profit>(q)); }

    /// Adds every member of `other`.
    void absorb(const ProfileSet& other)
    {
        check_arity(other.arity_);
        for (std::size_t i = 0; i < other.size(); ++i) {
            insert(other[i]);
        }
    }

    /// Members in lexicographic ascending order.
    std::vector<Profile> sorted() const
    {
        std::vector<Profile> out;
        out.reserve(count_);
        for (std::size_t i = 0; i < count_; ++i) {
            out.push_back(at(i));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const ProfileSet& a, const ProfileSet& b)
    {
        if (a.arity_ != b.arity_ || a.count_ != b.count_) {
            return false;
        }
        for (std::size_t i = 0; i < a.count_; ++i) {
            if (!b.contains(a[i])) {
                return false;
            }
        }
        return true;
    }

private:
    static std::size_t next_pow2(std::size_t x)
    {
        std::size_t p = 16;
        while (p < x) {
            p <<= 1;
        }
        return p;
    }

    static std::uint64_t mix(std::uint64_t x)
    {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

    static std::size_t hash(std::span<const Profit> q)
    {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (Profit p : q) {
            h = mix(h ^ static_cast<std::uint64_t>(p));
        }
        return static_cast<std::size_t>(h);
    }

    bool equal_at(std::size_t index, std::span<const Profit> q) const
    {
        return std::equal(q.begin(), q.end(), data_.begin() + static_cast<std::ptrdiff_t>(index * arity_));
    }

    void check_arity(std::size_t arity) const
    {
        if (arity != arity_) {
            throw std::invalid_argument("profile arity mismatch: " + std::to_string(arity) + " vs " +
                                        std::to_string(arity_));
        }
    }

    void rehash(std::size_t slots)
    {
        slots_.assign(slots, 0);
        const std::size_t mask = slots - 1;
        for (std::size_t i = 0; i < count_; ++i) {
            std::size_t pos = hash((*this)[i]) & mask;
            while (slots_[pos] != 0) {
                pos = (pos + 1) & mask;
            }
            slots_[pos] = static_cast<std::uint32_t>(i + 1);
        }
    }

    std::size_t arity_;
    std::size_t cap_;
    std::size_t count_ = 0;
    std::vector<Profit> data_;
    std::vector<std::uint32_t> slots_;
    Profile upper_;
};

/// Profiles of all assignments of the listed items to {nobody, 1, ..., k}.
/// `profits[j][i]` is agent j's profit for item i; conflicts are ignored.
inline ProfileSet edgeless_profiles(const std::vector<std::vector<Profit>>& profits,
                                    std::size_t cap = kDefaultProfileCap)
{
    const std::size_t k = profits.size();
    const std::size_t items = k == 0 ? 0 : profits[0].size();
    ProfileSet current = ProfileSet::zero(k, cap);
    Profile scratch(k);
    for (std::size_t i = 0; i < items; ++i) {
        ProfileSet next = current;
        for (std::size_t m = 0; m < current.size(); ++m) {
            const auto q = current[m];
            for (std::size_t j = 0; j < k; ++j) {
                if (profits[j][i] == 0) {
                    continue;
                }
                std::copy(q.begin(), q.end(), scratch.begin());
                scratch[j] += profits[j][i];
                next.insert(scratch);
            }
        }
        current = std::move(next);
    }
    return current;
}

/// Profiles of all assignments of `vertices` of `inst`, ignoring edges.
inline ProfileSet edgeless_profiles(const Instance& inst, const std::vector<Vertex>& vertices,
                                    std::size_t cap = kDefaultProfileCap)
{
    std::vector<std::vector<Profit>> profits(inst.k(), std::vector<Profit>(vertices.size()));
    for (std::size_t j = 0; j < inst.k(); ++j) {
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            profits[j][i] = inst.profit(j, vertices[i]);
        }
    }
    return edgeless_profiles(profits, cap);
}

/// An assignment (0 = nobody, j = agent j) of the items realizing `target`
/// under `profits`, or nullopt when `target` is not attainable. Items are
/// only given to agents that value them positively.
inline std::optional<std::vector<std::size_t>>
edgeless_assignment(const std::vector<std::vector<Profit>>& profits, const Profile& target,
                    std::size_t cap = kDefaultProfileCap)
{
    const std::size_t k = profits.size();
    const std::size_t items = k == 0 ? 0 : profits[0].size();
    if (target.size() != k) {
        throw std::invalid_argument("target arity mismatch");
    }
    std::vector<ProfileSet> layers;
    layers.reserve(items + 1);
    layers.push_back(ProfileSet::zero(k, cap));
    Profile scratch(k);
    for (std::size_t i = 0; i < items; ++i) {
        ProfileSet next = layers.back();
        const ProfileSet& prev = layers.back();
        for (std::size_t m = 0; m < prev.size(); ++m) {
            const auto q = prev[m];
            for (std::size_t j = 0; j < k; ++j) {
                if (profits[j][i] == 0) {
                    continue;
                }
                std::copy(q.begin(), q.end(), scratch.begin());
                scratch[j] += profits[j][i];
                if (scratch[j] <= target[j]) {
                    next.insert(scratch);
                }
            }
        }
        layers.push_back(std::move(next));
    }
    if (!layers.back().contains(target)) {
        return std::nullopt;
    }
    std::vector<std::size_t> assignment(items, 0);
    Profile rest = target;
    for (std::size_t i = items; i-- > 0;) {
        if (layers[i].contains(rest)) {
            continue;
        }
        bool placed = false;
        for (std::size_t j = 0; j < k && !placed; ++j) {
            if (profits[j][i] == 0 || rest[j] < profits[j][i]) {
                continue;
            }
            rest[j] -= profits[j][i];
            if (layers[i].contains(rest)) {
                assignment[i] = j + 1;
                placed = true;
            } else {
                rest[j] += profits[j][i];
            }
        }
        if (!placed) {
            throw std::logic_error("edgeless_assignment: backtrack failed");
        }
    }
    return assignment;
}

/// {q1 + q2 : q1 in a, q2 in b}
inline ProfileSet merge_profile_sets(const ProfileSet& a, const ProfileSet& b)
{
    if (a.arity() != b.arity()) {
        throw std::invalid_argument("merge_profile_sets: arity mismatch (" +
                                    std::to_string(a.arity()) + " vs " + std::to_string(b.arity()) +
                                    ")");
    }
    const std::size_t k = a.arity();
    ProfileSet out(k, std::max(a.cap(), b.cap()));
    Profile scratch(k);
    for (std::size_t x = 0; x < a.size(); ++x) {
        const auto qa = a[x];
        for (std::size_t y = 0; y < b.size(); ++y) {
            const auto qb = b[y];
            for (std::size_t j = 0; j < k; ++j) {
                scratch[j] = qa[j] + qb[j];
            }
            out.insert(scratch);
        }
    }
    return out;
}

/// Adds `delta` to every member. Negative entries are allowed as long as the
/// results stay nonnegative.
inline ProfileSet shift(const ProfileSet& s, const Profile& delta)
{
    if (delta.size() != s.arity()) {
        throw std::invalid_argument("shift: arity mismatch");
    }
    ProfileSet out(s.arity(), s.cap());
    out.reserve(s.size());
    Profile scratch(s.arity());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto q = s[i];
        for (std::size_t j = 0; j < s.arity(); ++j) {
            scratch[j] = q[j] + delta[j];
        }
        out.insert(scratch);
    }
    return out;
}

/// The member with the largest satisfaction level; ties go to the
/// lexicographically smallest member so the choice is order independent.
inline Profile best_profile(const ProfileSet& s)
{
    if (s.empty()) {
        throw std::invalid_argument("best_profile of an empty profile set");
    }
    std::size_t best = 0;
    Profit best_value = -1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto q = s[i];
        const Profit value = *std::min_element(q.begin(), q.end());
        if (value > best_value ||
            (value == best_value &&
             std::lexicographical_compare(q.begin(), q.end(), s[best].begin(), s[best].end()))) {
            best = i;
            best_value = value;
        }
    }
    return s.at(best);
}

inline Profit best_satisfaction(const ProfileSet& s)
{
    if (s.empty()) {
        throw std::invalid_argument("best_satisfaction of an empty profile set");
    }
    Profit best = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto q = s[i];
        best = std::max(best, *std::min_element(q.begin(), q.end()));
    }
    return best;
}

/// Pareto-maximal members only. Sound for optimum extraction, not for
/// computing full profile sets.
inline ProfileSet dominance_prune(const ProfileSet& s)
{
    auto members = s.sorted();
    std::reverse(members.begin(), members.end());
    std::vector<Profile> kept;
    for (const auto& q : members) {
        // A dominating member is lexicographically larger, so it was seen already.
        const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const Profile& r) {
            for (std::size_t j = 0; j < q.size(); ++j) {
                if (r[j] < q[j]) {
                    return false;
                }
            }
            return true;
        });
        if (!dominated) {
            kept.push_back(q);
        }
    }
    ProfileSet out(s.arity(), s.cap());
    for (const auto& q : kept) {
        out.insert(q);
    }
    return out;
}

/// One profile per line, space separated, lexicographically sorted.
inline std::string dump_profiles(const ProfileSet& s)
{
    std::ostringstream out;
    for (const auto& q : s.sorted()) {
        for (std::size_t j = 0; j < q.size(); ++j) {
            out << (j ? " " : "") << q[j];
        }
        out << '\n';
    }
    return out.str();
}

inline ProfileSet parse_profiles(std::string_view text, std::size_t arity)
{
    ProfileSet s(arity);
    const auto lines = detail::lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tok = detail::split_ws(lines[i]);
        if (tok.empty()) {
            continue;
        }
        if (tok.size() != arity) {
            throw ParseError(i + 1, "expected " + std::to_string(arity) + " profits");
        }
        Profile q;
        for (auto t : tok) {
            q.push_back(detail::parse_int<Profit>(t, i + 1, "profit"));
        }
        s.insert(q);
    }
    return s;
}

} // namespace fkd
