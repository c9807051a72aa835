#pragma once

// Fair division on convex bipartite conflict graphs.
//
// A-side vertices are ordered a_1..a_s so that every B-vertex sees an
// interval [b^-, b^+] of them. B-vertices are processed in blocks of equal
// b^+; stage j covers A_j = {a_1..a_{u_j}} and B_j = {b_1..b_{v_j}}. A stage
// table maps a guess (i_1..i_k) of the highest A-position per agent
// (0 = none) to the set of profiles of colorings of G_j consistent with it.

#include "fkd/error.hpp"
#include "fkd/instance.hpp"
#include "fkd/pq_tree.hpp"
#include "fkd/profile_set.hpp"
#include "fkd/solution.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace fkd {

struct ConvexOrdering {
    /// a_1..a_s
    std::vector<Vertex> a_order;
    /// B-side vertices, ascending id.
    std::vector<Vertex> b_vertices;
    /// Interval endpoints per entry of b_vertices, 1-based positions in
    /// a_order; both 0 for an isolated B-vertex.
    std::vector<std::size_t> b_lo;
    std::vector<std::size_t> b_hi;
};

/// Checks that (a_order, b_set) is a bipartition of `inst` under which every
/// B-neighborhood is an interval of a_order, and computes the endpoints.
inline ConvexOrdering validate_convex_ordering(const Instance& inst, const std::vector<Vertex>& a_order,
                                               const std::vector<Vertex>& b_set)
{
    constexpr std::size_t unseen = 0;
    std::vector<std::size_t> position(inst.n(), unseen); // 1-based A position
    std::vector<char> side(inst.n(), 0);
    auto claim = [&](Vertex v, char s) {
        if (v >= inst.n()) {
            throw InvalidInput("ordering names vertex " + std::to_string(v + 1) + " outside 1.." +
                               std::to_string(inst.n()));
        }
        if (side[v] != 0) {
            throw InvalidInput("vertex " + std::to_string(v + 1) + " listed twice in the ordering");
        }
        side[v] = s;
    };
    for (std::size_t i = 0; i < a_order.size(); ++i) {
        claim(a_order[i], 'A');
        position[a_order[i]] = i + 1;
    }
    for (Vertex b : b_set) {
        claim(b, 'B');
    }
    for (Vertex v = 0; v < inst.n(); ++v) {
        if (side[v] == 0) {
            throw InvalidInput("vertex " + std::to_string(v + 1) + " is on neither side of the bipartition");
        }
    }
    for (const auto& [u, v] : inst.edges()) {
        if (side[u] == side[v]) {
            throw InvalidInput("edge {" + std::to_string(u + 1) + "," + std::to_string(v + 1) +
                               "} lies inside side " + std::string(1, side[u]));
        }
    }
    ConvexOrdering co;
    co.a_order = a_order;
    co.b_vertices = b_set;
    std::sort(co.b_vertices.begin(), co.b_vertices.end());
    for (Vertex b : co.b_vertices) {
        std::vector<std::size_t> pos;
        for (Vertex a : inst.neighbors(b)) {
            pos.push_back(position[a]);
        }
        std::sort(pos.begin(), pos.end());
        if (pos.empty()) {
            co.b_lo.push_back(0);
            co.b_hi.push_back(0);
            continue;
        }
        for (std::size_t i = 1; i < pos.size(); ++i) {
            if (pos[i] != pos[i - 1] + 1) {
                throw InvalidInput("neighborhood of B-vertex " + std::to_string(b + 1) +
                                   " is not an interval: gap at A-vertex " +
                                   std::to_string(a_order[pos[i - 1]] + 1) + " (position " +
                                   std::to_string(pos[i - 1] + 1) + ")");
            }
        }
        co.b_lo.push_back(pos.front());
        co.b_hi.push_back(pos.back());
    }
    return co;
}

/// Finds an A-order making every B-neighborhood consecutive, if one exists.
inline std::optional<ConvexOrdering> find_convex_ordering(const Instance& inst, const std::vector<Vertex>& a_set,
                                                          const std::vector<Vertex>& b_set)
{
    std::vector<std::size_t> column(inst.n(), std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < a_set.size(); ++i) {
        column[a_set[i]] = i;
    }
    std::vector<char> in_b(inst.n(), 0);
    for (Vertex b : b_set) {
        in_b[b] = 1;
    }
    for (const auto& [u, v] : inst.edges()) {
        const bool ua = column[u] != std::numeric_limits<std::size_t>::max();
        const bool va = column[v] != std::numeric_limits<std::size_t>::max();
        if (ua == va || (!ua && !in_b[u]) || (!va && !in_b[v])) {
            throw InvalidInput("edge {" + std::to_string(u + 1) + "," + std::to_string(v + 1) +
                               "} does not cross the bipartition");
        }
    }
    std::vector<std::vector<std::size_t>> rows;
    for (Vertex b : b_set) {
        std::vector<std::size_t> row;
        for (Vertex a : inst.neighbors(b)) {
            row.push_back(column[a]);
        }
        rows.push_back(std::move(row));
    }
    const auto order = consecutive_ones_order(a_set.size(), rows);
    if (!order) {
        return std::nullopt;
    }
    std::vector<Vertex> a_order;
    for (std::size_t c : *order) {
        a_order.push_back(a_set[c]);
    }
    return validate_convex_ordering(inst, a_order, b_set);
}

/// Recognition without a given bipartition: each component is 2-colored
/// and both choices of A-side are tried. Isolated vertices go to A.
inline std::optional<ConvexOrdering> recognize_convex(const Instance& inst, std::string* reason = nullptr)
{
    auto fail = [&](std::string why) -> std::optional<ConvexOrdering> {
        if (reason) {
            *reason = std::move(why);
        }
        return std::nullopt;
    };
    std::vector<Vertex> a_order, b_set;
    for (const auto& comp : connected_components(inst)) {
        if (comp.vertices.size() == 1) {
            a_order.push_back(comp.vertices.front());
            continue;
        }
        const Instance& sub = comp.sub;
        std::vector<int> side(sub.n(), -1);
        side[0] = 0;
        std::vector<Vertex> queue{0};
        for (std::size_t h = 0; h < queue.size(); ++h) {
            const Vertex x = queue[h];
            for (Vertex y : sub.neighbors(x)) {
                if (side[y] < 0) {
                    side[y] = 1 - side[x];
                    queue.push_back(y);
                } else if (side[y] == side[x]) {
                    return fail("not bipartite: odd cycle through edge {" +
                                std::to_string(comp.to_original(x) + 1) + "," +
                                std::to_string(comp.to_original(y) + 1) + "}");
                }
            }
        }
        std::optional<ConvexOrdering> found;
        for (int a_side = 0; a_side < 2 && !found; ++a_side) {
            std::vector<Vertex> as, bs;
            for (Vertex x = 0; x < sub.n(); ++x) {
                (side[x] == a_side ? as : bs).push_back(x);
            }
            found = find_convex_ordering(sub, as, bs);
        }
        if (!found) {
            return fail("consecutive-ones test failed on both sides of the component containing vertex " +
                        std::to_string(comp.vertices.front() + 1));
        }
        for (Vertex a : found->a_order) {
            a_order.push_back(comp.to_original(a));
        }
        for (Vertex b : found->b_vertices) {
            b_set.push_back(comp.to_original(b));
        }
    }
    return validate_convex_ordering(inst, a_order, b_set);
}

/// Ordering file: `A: <ids...>` (in order) and `B: <ids...>`, 1-based.
inline std::string serialize_ordering(const ConvexOrdering& co)
{
    std::ostringstream out;
    out << "A:";
    for (Vertex a : co.a_order) {
        out << ' ' << (a + 1);
    }
    out << "\nB:";
    for (Vertex b : co.b_vertices) {
        out << ' ' << (b + 1);
    }
    out << '\n';
    return out.str();
}

inline std::pair<std::vector<Vertex>, std::vector<Vertex>> parse_ordering(std::string_view text)
{
    std::optional<std::vector<Vertex>> a, b;
    const auto lines = detail::lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tok = detail::split_ws(lines[i]);
        if (tok.empty() || tok[0] == "c") {
            continue;
        }
        std::optional<std::vector<Vertex>>* target = nullptr;
        if (tok[0] == "A:") {
            target = &a;
        } else if (tok[0] == "B:") {
            target = &b;
        } else {
            throw ParseError(i + 1, "expected 'A:' or 'B:' line");
        }
        if (target->has_value()) {
            throw ParseError(i + 1, "repeated '" + std::string(tok[0]) + "' line");
        }
        std::vector<Vertex> ids;
        for (std::size_t t = 1; t < tok.size(); ++t) {
            const auto id = detail::parse_int<std::size_t>(tok[t], i + 1, "vertex id");
            if (id == 0) {
                throw ParseError(i + 1, "vertex ids are 1-based");
            }
            ids.push_back(id - 1);
        }
        *target = std::move(ids);
    }
    if (!a || !b) {
        throw ParseError(lines.size(), "ordering needs both an 'A:' and a 'B:' line");
    }
    return {std::move(*a), std::move(*b)};
}

/// One B-vertex with its interval; positions 1-based.
struct EndpointRow {
    std::size_t lo = 0;
    std::size_t hi = 0;
    Vertex id = 0;
};

struct StageStructure {
    /// b_1..b_t sorted by (b^+, b^-, id).
    std::vector<EndpointRow> b_rows;
    /// u_1 < ... < u_r: distinct larger endpoints.
    std::vector<std::size_t> u;
    /// v_j = |{b : b^+ <= u_j}|.
    std::vector<std::size_t> v;
};

inline StageStructure stage_structure(std::vector<EndpointRow> rows)
{
    for (const auto& row : rows) {
        if (row.lo == 0 || row.lo > row.hi) {
            throw std::invalid_argument("stage_structure: B-vertex " + std::to_string(row.id + 1) +
                                        " has no interval (isolated vertices are handled separately)");
        }
    }
    std::sort(rows.begin(), rows.end(), [](const EndpointRow& x, const EndpointRow& y) {
        if (x.hi != y.hi) {
            return x.hi < y.hi;
        }
        if (x.lo != y.lo) {
            return x.lo < y.lo;
        }
        return x.id < y.id;
    });
    StageStructure ss;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i + 1 == rows.size() || rows[i + 1].hi != rows[i].hi) {
            ss.u.push_back(rows[i].hi);
            ss.v.push_back(i + 1);
        }
    }
    ss.b_rows = std::move(rows);
    return ss;
}

inline StageStructure stage_structure(const ConvexOrdering& co)
{
    std::vector<EndpointRow> rows;
    for (std::size_t i = 0; i < co.b_vertices.size(); ++i) {
        rows.push_back(EndpointRow{co.b_lo[i], co.b_hi[i], co.b_vertices[i]});
    }
    return stage_structure(std::move(rows));
}

/// The stage dynamic program for one connected convex bipartite graph with
/// at least two vertices. All stage tables are kept for witness recovery.
class ConvexDp {
public:
    using Guess = std::vector<std::size_t>;

    ConvexDp(const Instance& inst, const ConvexOrdering& co, SolveOptions options = {})
        : inst_(inst), options_(options), k_(inst.k())
    {
        if (inst.n() < 2 || connected_components(inst).size() != 1) {
            throw std::invalid_argument("ConvexDp needs a connected graph with at least two vertices");
        }
        structure_ = stage_structure(co);
        a_ = co.a_order;
        s_ = a_.size();
        t_ = structure_.b_rows.size();
        for (const auto& row : structure_.b_rows) {
            b_.push_back(row.id);
            lo_.push_back(row.lo);
            hi_.push_back(row.hi);
        }
        if (structure_.u.back() != s_ || structure_.v.back() != t_) {
            throw std::invalid_argument("ConvexDp: ordering leaves vertices outside the last stage");
        }
        radix_ = s_ + 1;
        std::uint64_t span = 1;
        for (std::size_t l = 0; l < k_; ++l) {
            if (span > std::numeric_limits<std::uint64_t>::max() / radix_) {
                throw ResourceLimit("guess space (s+1)^k does not fit a 64-bit key");
            }
            span *= radix_;
        }
        run();
    }

    /// Union of the final stage table: every profile of the whole graph
    /// (only the Pareto frontier of it when pruning is on).
    const ProfileSet& profiles() const { return profiles_; }
    const SolveStats& stats() const { return stats_; }
    const StageStructure& structure() const { return structure_; }
    std::size_t stages() const { return structure_.u.size(); }

    /// Stage j (1-based) table as sorted (guess, set) pairs.
    std::vector<std::pair<Guess, const ProfileSet*>> table(std::size_t j) const
    {
        std::vector<std::pair<Guess, const ProfileSet*>> out;
        for (const auto& [key, set] : tables_.at(j)) {
            out.emplace_back(decode(key), &set);
        }
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        return out;
    }

    /// The vertex sets of G_j, original ids: A_j then B_j.
    std::vector<Vertex> stage_vertices(std::size_t j) const
    {
        std::vector<Vertex> out(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(u(j)));
        out.insert(out.end(), b_.begin(), b_.begin() + static_cast<std::ptrdiff_t>(v(j)));
        return out;
    }

    /// A-vertex at 1-based position i.
    Vertex a_vertex(std::size_t i) const { return a_[i - 1]; }

    /// A coloring of the whole graph with profile `target`, which must be a
    /// member of profiles().
    Coloring witness(const Profile& target) const
    {
        const std::size_t r = stages();
        std::vector<std::size_t> color(inst_.n(), 0);
        std::optional<Guess> guess;
        for (const auto& [g, set] : table(r)) {
            if (set->contains(target)) {
                guess = g;
                break;
            }
        }
        if (!guess) {
            throw std::invalid_argument("ConvexDp::witness: profile is not attainable");
        }
        Profile want = target;
        for (std::size_t j = r; j >= 2; --j) {
            const Profile qa = a_side_profit(j, *guess);
            for (std::size_t l = 0; l < k_; ++l) {
                want[l] -= qa[l];
            }
            bool done = false;
            for_each_b_guess(j, *guess, [&](const Guess& mu) {
                if (done) {
                    return;
                }
                std::vector<Vertex> verts;
                const auto mod = modified_profits(j, *guess, mu, verts);
                const ProfileSet fresh = edgeless_profiles(mod, options_.profile_cap);
                const Profile qb = b_side_profit(mu);
                Profile rest(k_);
                for (std::size_t x = 0; x < fresh.size() && !done; ++x) {
                    const auto qp = fresh[x];
                    bool nonneg = true;
                    for (std::size_t l = 0; l < k_; ++l) {
                        rest[l] = want[l] - qp[l] - qb[l];
                        nonneg = nonneg && rest[l] >= 0;
                    }
                    if (!nonneg) {
                        continue;
                    }
                    const auto tau = find_predecessor(j, *guess, rest);
                    if (!tau) {
                        continue;
                    }
                    const auto assignment = edgeless_assignment(mod, fresh.at(x), options_.profile_cap);
                    for (std::size_t i = 0; i < verts.size(); ++i) {
                        color[verts[i]] = (*assignment)[i];
                    }
                    for (std::size_t l = 0; l < k_; ++l) {
                        if ((*guess)[l] > u(j - 1)) {
                            color[a_vertex((*guess)[l])] = l + 1;
                        }
                        if (mu[l] <= t_) {
                            color[b_[mu[l] - 1]] = l + 1;
                        }
                    }
                    want = rest;
                    guess = *tau;
                    done = true;
                }
            });
            if (!done) {
                throw std::logic_error("ConvexDp::witness: no decomposition at stage " + std::to_string(j));
            }
        }
        const Profile qa = a_side_profit(1, *guess);
        for (std::size_t l = 0; l < k_; ++l) {
            want[l] -= qa[l];
        }
        std::vector<Vertex> verts;
        const auto mod = modified_profits(1, *guess, {}, verts);
        const auto assignment = edgeless_assignment(mod, want, options_.profile_cap);
        if (!assignment) {
            throw std::logic_error("ConvexDp::witness: first stage does not realize the remainder");
        }
        for (std::size_t i = 0; i < verts.size(); ++i) {
            color[verts[i]] = (*assignment)[i];
        }
        for (std::size_t l = 0; l < k_; ++l) {
            if ((*guess)[l] > 0) {
                color[a_vertex((*guess)[l])] = l + 1;
            }
        }
        return Coloring::from_assignment(color, k_);
    }

private:
    std::size_t u(std::size_t j) const { return j == 0 ? 0 : structure_.u[j - 1]; }
    std::size_t v(std::size_t j) const { return j == 0 ? 0 : structure_.v[j - 1]; }

    /// a_i adjacent to b_h (positions 1-based, h in the sorted B-order).
    bool adjacent(std::size_t i, std::size_t h) const { return lo_[h - 1] <= i && i <= hi_[h - 1]; }

    std::uint64_t encode(const Guess& g) const
    {
        std::uint64_t key = 0;
        for (std::size_t l = k_; l-- > 0;) {
            key = key * radix_ + g[l];
        }
        return key;
    }

    Guess decode(std::uint64_t key) const
    {
        Guess g(k_);
        for (std::size_t l = 0; l < k_; ++l) {
            g[l] = static_cast<std::size_t>(key % radix_);
            key /= radix_;
        }
        return g;
    }

    static bool distinct_nonzero(const Guess& g, std::size_t none)
    {
        for (std::size_t x = 0; x < g.size(); ++x) {
            for (std::size_t y = x + 1; y < g.size(); ++y) {
                if (g[x] != none && g[x] == g[y]) {
                    return false;
                }
            }
        }
        return true;
    }

    /// All tuples in {0..limit}^k with pairwise distinct nonzero entries.
    std::vector<Guess> guesses(std::size_t limit) const
    {
        std::vector<Guess> out;
        Guess g(k_, 0);
        while (true) {
            if (distinct_nonzero(g, 0)) {
                out.push_back(g);
            }
            std::size_t l = 0;
            while (l < k_ && g[l] == limit) {
                g[l++] = 0;
            }
            if (l == k_) {
                break;
            }
            ++g[l];
        }
        return out;
    }

    /// q^A: profits of the guessed A-vertices that are new at stage j.
    Profile a_side_profit(std::size_t j, const Guess& g) const
    {
        Profile q(k_, 0);
        for (std::size_t l = 0; l < k_; ++l) {
            if (g[l] > u(j - 1)) {
                q[l] = inst_.profit(l, a_vertex(g[l]));
            }
        }
        return q;
    }

    /// q^B(mu); entries equal to t+1 stand for "no B-vertex".
    Profile b_side_profit(const Guess& mu) const
    {
        Profile q(k_, 0);
        for (std::size_t l = 0; l < k_; ++l) {
            if (mu[l] <= t_) {
                q[l] = inst_.profit(l, b_[mu[l] - 1]);
            }
        }
        return q;
    }

    /// Visits every B-side guess compatible with `g` at stage j > 1: per
    /// agent, t+1 or a new B-position not adjacent to a_{i_l}; finite
    /// entries pairwise distinct.
    template <typename Visit>
    void for_each_b_guess(std::size_t j, const Guess& g, Visit&& visit) const
    {
        const std::size_t none = t_ + 1;
        std::vector<std::vector<std::size_t>> options(k_);
        for (std::size_t l = 0; l < k_; ++l) {
            for (std::size_t h = v(j - 1) + 1; h <= v(j); ++h) {
                if (g[l] == 0 || !adjacent(g[l], h)) {
                    options[l].push_back(h);
                }
            }
            options[l].push_back(none);
        }
        std::vector<std::size_t> idx(k_, 0);
        Guess mu(k_);
        while (true) {
            for (std::size_t l = 0; l < k_; ++l) {
                mu[l] = options[l][idx[l]];
            }
            if (distinct_nonzero_finite(mu, none)) {
                visit(mu);
            }
            std::size_t l = 0;
            while (l < k_ && idx[l] + 1 == options[l].size()) {
                idx[l++] = 0;
            }
            if (l == k_) {
                break;
            }
            ++idx[l];
        }
    }

    static bool distinct_nonzero_finite(const Guess& mu, std::size_t none)
    {
        return distinct_nonzero(mu, none);
    }

    /// Modified profits over the free vertices of the stage. For j = 1 that
    /// is G_1 minus the guessed A-vertices; for j > 1 it is G'_j, the new
    /// vertices minus the guessed A- and B-vertices. `verts` receives the
    /// original ids in column order.
    std::vector<std::vector<Profit>> modified_profits(std::size_t j, const Guess& g, const Guess& mu,
                                                      std::vector<Vertex>& verts) const
    {
        verts.clear();
        std::vector<std::size_t> a_pos, b_pos;
        const std::size_t a_from = j == 1 ? 1 : u(j - 1) + 1;
        const std::size_t b_from = j == 1 ? 1 : v(j - 1) + 1;
        for (std::size_t i = a_from; i <= u(j); ++i) {
            if (std::find(g.begin(), g.end(), i) == g.end()) {
                a_pos.push_back(i);
            }
        }
        for (std::size_t h = b_from; h <= v(j); ++h) {
            if (j == 1 || std::find(mu.begin(), mu.end(), h) == mu.end()) {
                b_pos.push_back(h);
            }
        }
        std::vector<std::vector<Profit>> mod(k_, std::vector<Profit>(a_pos.size() + b_pos.size(), 0));
        for (std::size_t l = 0; l < k_; ++l) {
            const std::size_t il = g[l];
            const std::size_t ml = j == 1 ? 0 : mu[l];
            const bool has_b = j > 1 && ml <= t_;
            for (std::size_t x = 0; x < a_pos.size(); ++x) {
                const std::size_t i = a_pos[x];
                const std::size_t top = j == 1 ? il : std::max(il, u(j - 1));
                bool zero = (j == 1 && il == 0) || i > top;
                zero = zero || (has_b && adjacent(i, ml));
                mod[l][x] = zero ? 0 : inst_.profit(l, a_vertex(i));
            }
            for (std::size_t y = 0; y < b_pos.size(); ++y) {
                const std::size_t h = b_pos[y];
                bool zero = il > 0 && adjacent(il, h);
                zero = zero || (j > 1 && h < ml);
                mod[l][a_pos.size() + y] = zero ? 0 : inst_.profit(l, b_[h - 1]);
            }
        }
        for (std::size_t i : a_pos) {
            verts.push_back(a_vertex(i));
        }
        for (std::size_t h : b_pos) {
            verts.push_back(b_[h - 1]);
        }
        return mod;
    }

    /// Visits every stage-(j-1) guess tau agreeing with g on entries <= u_{j-1}.
    template <typename Visit>
    void for_each_predecessor(std::size_t j, const Guess& g, Visit&& visit) const
    {
        const std::size_t prev = u(j - 1);
        std::vector<std::size_t> free;
        Guess tau(k_);
        for (std::size_t l = 0; l < k_; ++l) {
            if (g[l] <= prev) {
                tau[l] = g[l];
            } else {
                tau[l] = 0;
                free.push_back(l);
            }
        }
        while (true) {
            if (visit(tau)) {
                return;
            }
            std::size_t f = 0;
            while (f < free.size() && tau[free[f]] == prev) {
                tau[free[f++]] = 0;
            }
            if (f == free.size()) {
                return;
            }
            ++tau[free[f]];
        }
    }

    std::optional<Guess> find_predecessor(std::size_t j, const Guess& g, const Profile& q) const
    {
        std::optional<Guess> found;
        const auto& previous = tables_.at(j - 1);
        for_each_predecessor(j, g, [&](const Guess& tau) {
            const auto it = previous.find(encode(tau));
            if (it != previous.end() && it->second.contains(q)) {
                found = tau;
                return true;
            }
            return false;
        });
        return found;
    }

    std::optional<ProfileSet> first_stage(const Guess& g, SolveStats& stats) const
    {
        std::vector<Vertex> verts;
        const auto mod = modified_profits(1, g, {}, verts);
        ProfileSet fresh = edgeless_profiles(mod, options_.profile_cap);
        stats.combine_work += fresh.size() * (verts.size() * k_ + 1);
        return shift(fresh, a_side_profit(1, g));
    }

    std::optional<ProfileSet> later_stage(std::size_t j, const Guess& g, SolveStats& stats) const
    {
        ProfileSet before(k_, options_.profile_cap);
        const auto& previous = tables_.at(j - 1);
        for_each_predecessor(j, g, [&](const Guess& tau) {
            const auto it = previous.find(encode(tau));
            if (it != previous.end()) {
                before.absorb(it->second);
            }
            return false;
        });
        if (before.empty()) {
            return std::nullopt;
        }
        // The union over (tau, mu) of q + q' + q^A + q^B(mu) factors into
        // (union over tau) + (union over mu) + q^A.
        ProfileSet added(k_, options_.profile_cap);
        for_each_b_guess(j, g, [&](const Guess& mu) {
            std::vector<Vertex> verts;
            const auto mod = modified_profits(j, g, mu, verts);
            const ProfileSet fresh = edgeless_profiles(mod, options_.profile_cap);
            stats.combine_work += fresh.size() * (verts.size() * k_ + 1);
            added.absorb(shift(fresh, b_side_profit(mu)));
        });
        if (options_.prune) {
            before = dominance_prune(before);
            added = dominance_prune(added);
        }
        stats.combine_work += before.size() * added.size();
        return shift(merge_profile_sets(before, added), a_side_profit(j, g));
    }

    void run()
    {
        tables_.resize(stages() + 1);
        for (std::size_t j = 1; j <= stages(); ++j) {
            const auto todo = guesses(u(j));
            std::vector<std::optional<ProfileSet>> results(todo.size());
            std::vector<SolveStats> local(todo.size());
            parallel_for(todo.size(), options_.threads, [&](std::size_t x) {
                results[x] = j == 1 ? first_stage(todo[x], local[x]) : later_stage(j, todo[x], local[x]);
                if (results[x] && options_.prune) {
                    results[x] = dominance_prune(*results[x]);
                }
            });
            for (std::size_t x = 0; x < todo.size(); ++x) {
                stats_.combine_work += local[x].combine_work;
                if (!results[x] || results[x]->empty()) {
                    continue;
                }
                ++stats_.dp_cells;
                stats_.profiles_stored += results[x]->size();
                tables_[j].emplace(encode(todo[x]), std::move(*results[x]));
            }
        }
        profiles_ = ProfileSet(k_, options_.profile_cap);
        for (const auto& [key, set] : tables_[stages()]) {
            profiles_.absorb(set);
        }
        if (options_.prune) {
            profiles_ = dominance_prune(profiles_);
        }
    }

    const Instance& inst_;
    SolveOptions options_;
    std::size_t k_;
    StageStructure structure_;
    std::vector<Vertex> a_;
    std::vector<Vertex> b_;
    std::vector<std::size_t> lo_, hi_;
    std::size_t s_ = 0, t_ = 0;
    std::uint64_t radix_ = 1;
    std::vector<std::unordered_map<std::uint64_t, ProfileSet>> tables_;
    ProfileSet profiles_;
    SolveStats stats_;
};

/// Every profile of a connected convex bipartite instance with at least two
/// vertices.
inline ProfileSet solve_connected_convex(const Instance& inst, const ConvexOrdering& co, SolveOptions options = {},
                                         SolveStats* stats = nullptr)
{
    ConvexDp dp(inst, co, options);
    if (stats) {
        *stats = dp.stats();
    }
    return dp.profiles();
}

/// Restricts an ordering of the whole graph to one component (local ids).
inline ConvexOrdering restrict_ordering(const Instance& inst, const ConvexOrdering& co, const Component& comp)
{
    std::vector<std::size_t> local(inst.n(), std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < comp.vertices.size(); ++i) {
        local[comp.vertices[i]] = i;
    }
    std::vector<Vertex> a, b;
    for (Vertex x : co.a_order) {
        if (local[x] != std::numeric_limits<std::size_t>::max()) {
            a.push_back(local[x]);
        }
    }
    for (Vertex x : co.b_vertices) {
        if (local[x] != std::numeric_limits<std::size_t>::max()) {
            b.push_back(local[x]);
        }
    }
    return validate_convex_ordering(comp.sub, a, b);
}

/// Solves a convex bipartite instance component by component. Without an
/// ordering one is recognized first (InvalidInput if none exists).
inline ExactResult solve_convex(const Instance& inst, std::optional<ConvexOrdering> ordering = std::nullopt,
                                SolveOptions options = {})
{
    if (!ordering) {
        std::string why;
        ordering = recognize_convex(inst, &why);
        if (!ordering) {
            throw InvalidInput("not a convex bipartite graph: " + why);
        }
    } else {
        ordering = validate_convex_ordering(inst, ordering->a_order, ordering->b_vertices);
    }
    SolveStats stats;
    MergedParts merged(inst.k(), options.profile_cap, options.prune);
    std::vector<Vertex> isolated;
    struct Part {
        const Component* comp;
        std::optional<ConvexDp> dp;
    };
    const auto components = connected_components(inst);
    std::vector<Part> parts;
    for (const auto& comp : components) {
        if (comp.vertices.size() == 1) {
            isolated.push_back(comp.vertices.front());
            continue;
        }
        parts.push_back(Part{&comp, std::nullopt});
        parts.back().dp.emplace(comp.sub, restrict_ordering(inst, *ordering, comp), options);
        const auto& dp = *parts.back().dp;
        stats.dp_cells += dp.stats().dp_cells;
        stats.profiles_stored += dp.stats().profiles_stored;
        stats.combine_work += dp.stats().combine_work;
        merged.add(dp.profiles(), &stats);
    }
    std::vector<std::vector<Profit>> isolated_profits(inst.k(), std::vector<Profit>(isolated.size()));
    for (std::size_t j = 0; j < inst.k(); ++j) {
        for (std::size_t i = 0; i < isolated.size(); ++i) {
            isolated_profits[j][i] = inst.profit(j, isolated[i]);
        }
    }
    ProfileSet lone = edgeless_profiles(isolated_profits, options.profile_cap);
    stats.profiles_stored += lone.size();
    merged.add(lone, &stats);

    ExactResult out{merged.result(), {}};
    Solution& sol = out.solution;
    sol.method = "convex";
    sol.profile = best_profile(out.profiles);
    sol.optimum = satisfaction_level(sol.profile);
    const auto split = merged.split(sol.profile);
    std::vector<std::size_t> color(inst.n(), 0);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto local = parts[p].dp->witness(split[p]).assignment(parts[p].comp->vertices.size());
        for (std::size_t i = 0; i < local.size(); ++i) {
            color[parts[p].comp->vertices[i]] = local[i];
        }
    }
    const auto lone_assignment = edgeless_assignment(isolated_profits, split.back(), options.profile_cap);
    for (std::size_t i = 0; i < isolated.size(); ++i) {
        color[isolated[i]] = (*lone_assignment)[i];
    }
    sol.witness = Coloring::from_assignment(color, inst.k());
    sol.stats = stats;
    certify(inst, sol);
    return out;
}

} // namespace fkd
