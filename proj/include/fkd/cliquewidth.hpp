#pragma once

// Fair division over an l-expression (clique-width construction).
//
// A table maps a label profile (L_1..L_k), the labels used by each agent's
// class, to the profiles of colorings with exactly that label profile. The
// label profile is packed into one 64-bit word: agent s owns bits
// [s*l, (s+1)*l), bit (i-1) within it standing for label i.

#include "fkd/error.hpp"
#include "fkd/instance.hpp"
#include "fkd/profile_set.hpp"
#include "fkd/solution.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace fkd {

struct ExprNode {
    enum class Kind { Vertex, Union, Eta, Rho };
    Kind kind = Kind::Vertex;
    /// Vertex: the label. Eta/Rho: i.
    std::size_t a = 0;
    /// Eta/Rho: j (Rho relabels i to j).
    std::size_t b = 0;
    Vertex vertex = 0;
    std::size_t left = 0;
    std::size_t right = 0;
};

struct CliqueExpression {
    /// Children precede their parents; the root is the last node.
    std::vector<ExprNode> nodes;
    std::size_t labels = 0;

    std::size_t root() const { return nodes.size() - 1; }
};

namespace detail {

class SexprReader {
public:
    explicit SexprReader(std::string_view text) : text_(text) {}

    std::size_t line() const { return line_; }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') {
                ++line_;
            }
            ++pos_;
        }
    }

    bool at_end()
    {
        skip_space();
        return pos_ >= text_.size();
    }

    void expect(char c)
    {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != c) {
            throw ParseError(line_, std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    bool peek(char c)
    {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    std::string_view atom()
    {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')') {
            ++pos_;
        }
        if (pos_ == start) {
            throw ParseError(line_, "expected a token");
        }
        return text_.substr(start, pos_ - start);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

} // namespace detail

/// Parses `(v <label> <id>) | (u e e) | (eta i j e) | (rho i j e)` with an
/// optional leading `cw <l>` line. Vertex ids are 1-based in the text.
inline CliqueExpression parse_k_expression(std::string_view text)
{
    std::size_t declared = 0;
    {
        const auto lines = detail::lines_of(text);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const auto tok = detail::split_ws(lines[i]);
            if (tok.empty()) {
                continue;
            }
            if (tok[0] == "cw") {
                if (tok.size() != 2) {
                    throw ParseError(i + 1, "expected 'cw <labels>'");
                }
                declared = detail::parse_int<std::size_t>(tok[1], i + 1, "label budget");
                const std::size_t offset = static_cast<std::size_t>(lines[i].data() - text.data()) + lines[i].size();
                text = text.substr(std::min(offset, text.size()));
            }
            break;
        }
    }
    CliqueExpression expr;
    detail::SexprReader in(text);
    std::set<Vertex> seen;
    std::size_t max_label = 0;
    auto label = [&](std::size_t line) {
        const auto v = detail::parse_int<std::size_t>(in.atom(), line, "label");
        if (v == 0) {
            throw ParseError(line, "labels start at 1");
        }
        if (declared != 0 && v > declared) {
            throw ParseError(line, "label " + std::to_string(v) + " exceeds the declared budget " +
                                       std::to_string(declared));
        }
        max_label = std::max(max_label, v);
        return v;
    };
    // Iterative descent keeps deep (linear) expressions off the call stack.
    struct Frame {
        ExprNode node;
        std::size_t line;
        std::vector<std::size_t> kids;
        std::size_t need;
    };
    std::vector<Frame> stack;
    std::optional<std::size_t> finished;
    do {
        const std::size_t line = in.line();
        in.expect('(');
        const auto op = in.atom();
        Frame f{{}, line, {}, 0};
        if (op == "v") {
            f.node.kind = ExprNode::Kind::Vertex;
            f.node.a = label(line);
            const auto id = detail::parse_int<std::size_t>(in.atom(), line, "vertex id");
            if (id == 0) {
                throw ParseError(line, "vertex ids are 1-based");
            }
            if (!seen.insert(id - 1).second) {
                throw ParseError(line, "duplicate vertex id " + std::to_string(id));
            }
            f.node.vertex = id - 1;
        } else if (op == "u") {
            f.node.kind = ExprNode::Kind::Union;
            f.need = 2;
        } else if (op == "eta" || op == "rho") {
            f.node.kind = op == "eta" ? ExprNode::Kind::Eta : ExprNode::Kind::Rho;
            f.node.a = label(line);
            f.node.b = label(line);
            if (f.node.a == f.node.b) {
                throw ParseError(line, std::string(op) + " needs two different labels");
            }
            f.need = 1;
        } else {
            throw ParseError(line, "unknown operation '" + std::string(op) + "'");
        }
        stack.push_back(std::move(f));
        // Close every frame whose children are complete.
        while (!stack.empty() && stack.back().kids.size() == stack.back().need) {
            Frame done = std::move(stack.back());
            stack.pop_back();
            in.expect(')');
            if (done.node.kind == ExprNode::Kind::Union) {
                done.node.left = done.kids[0];
                done.node.right = done.kids[1];
            } else if (done.need == 1) {
                done.node.left = done.kids[0];
            }
            expr.nodes.push_back(done.node);
            const std::size_t id = expr.nodes.size() - 1;
            if (stack.empty()) {
                finished = id;
            } else {
                stack.back().kids.push_back(id);
            }
        }
    } while (!stack.empty());
    if (!in.at_end()) {
        throw ParseError(in.line(), "trailing input after the expression");
    }
    expr.labels = std::max(declared, max_label);
    return expr;
}

inline std::string serialize_k_expression(const CliqueExpression& expr)
{
    std::vector<std::string> text(expr.nodes.size());
    for (std::size_t x = 0; x < expr.nodes.size(); ++x) {
        const auto& n = expr.nodes[x];
        switch (n.kind) {
        case ExprNode::Kind::Vertex:
            text[x] = "(v " + std::to_string(n.a) + " " + std::to_string(n.vertex + 1) + ")";
            break;
        case ExprNode::Kind::Union:
            text[x] = "(u " + text[n.left] + " " + text[n.right] + ")";
            break;
        case ExprNode::Kind::Eta:
            text[x] = "(eta " + std::to_string(n.a) + " " + std::to_string(n.b) + " " + text[n.left] + ")";
            break;
        case ExprNode::Kind::Rho:
            text[x] = "(rho " + std::to_string(n.a) + " " + std::to_string(n.b) + " " + text[n.left] + ")";
            break;
        }
    }
    return "cw " + std::to_string(expr.labels) + "\n" + (expr.nodes.empty() ? "" : text[expr.root()]) + "\n";
}

struct LabeledGraph {
    std::vector<Vertex> vertices;           // ascending
    std::set<Edge> edges;                   // (min, max)
    std::map<Vertex, std::size_t> label;    // vertex -> label

    friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

/// The labeled graph built by the subexpression rooted at `node`.
inline LabeledGraph evaluate_expression(const CliqueExpression& expr, std::size_t node)
{
    std::vector<LabeledGraph> built(node + 1);
    for (std::size_t x = 0; x <= node; ++x) {
        const auto& n = expr.nodes[x];
        LabeledGraph g;
        switch (n.kind) {
        case ExprNode::Kind::Vertex:
            g.vertices = {n.vertex};
            g.label[n.vertex] = n.a;
            break;
        case ExprNode::Kind::Union: {
            g = built[n.left];
            const auto& r = built[n.right];
            g.vertices.insert(g.vertices.end(), r.vertices.begin(), r.vertices.end());
            std::sort(g.vertices.begin(), g.vertices.end());
            g.edges.insert(r.edges.begin(), r.edges.end());
            g.label.insert(r.label.begin(), r.label.end());
            break;
        }
        case ExprNode::Kind::Eta: {
            g = built[n.left];
            for (const auto& [x1, l1] : g.label) {
                for (const auto& [x2, l2] : g.label) {
                    if (x1 < x2 && ((l1 == n.a && l2 == n.b) || (l1 == n.b && l2 == n.a))) {
                        g.edges.emplace(x1, x2);
                    }
                }
            }
            break;
        }
        case ExprNode::Kind::Rho:
            g = built[n.left];
            for (auto& [x1, l1] : g.label) {
                if (l1 == n.a) {
                    l1 = n.b;
                }
            }
            break;
        }
        built[x] = std::move(g);
    }
    return built[node];
}

inline LabeledGraph evaluate_expression(const CliqueExpression& expr)
{
    if (expr.nodes.empty()) {
        return {};
    }
    return evaluate_expression(expr, expr.root());
}

/// nullopt when the expression builds exactly the instance graph (labels
/// ignored); otherwise the first difference found.
inline std::optional<std::string> check_expression_matches(const CliqueExpression& expr, const Instance& inst)
{
    const LabeledGraph g = evaluate_expression(expr);
    for (Vertex v : g.vertices) {
        if (v >= inst.n()) {
            return "unknown vertex " + std::to_string(v + 1) + " (instance has n = " + std::to_string(inst.n()) + ")";
        }
    }
    if (g.vertices.size() != inst.n()) {
        std::vector<bool> present(inst.n(), false);
        for (Vertex v : g.vertices) {
            present[v] = true;
        }
        for (Vertex v = 0; v < inst.n(); ++v) {
            if (!present[v]) {
                return "missing vertex " + std::to_string(v + 1);
            }
        }
    }
    for (const auto& e : g.edges) {
        if (!inst.adjacent(e.first, e.second)) {
            return "extra edge {" + std::to_string(e.first + 1) + "," + std::to_string(e.second + 1) + "}";
        }
    }
    for (const auto& e : inst.edges()) {
        if (!g.edges.count(e)) {
            return "missing edge {" + std::to_string(e.first + 1) + "," + std::to_string(e.second + 1) + "}";
        }
    }
    return std::nullopt;
}

/// Label-profile -> profile-set table of one expression node; absent keys
/// stand for empty sets.
using CwTable = std::unordered_map<std::uint64_t, ProfileSet>;

class CwDp {
public:
    using Key = std::uint64_t;

    CwDp(const Instance& inst, const CliqueExpression& expr, SolveOptions options = {})
        : inst_(inst), expr_(expr), options_(options), k_(inst.k()), l_(expr.labels)
    {
        if (k_ * l_ > 64) {
            throw ResourceLimit("label profiles need k*l = " + std::to_string(k_ * l_) + " bits, at most 64 supported");
        }
        if (expr.nodes.empty()) {
            throw std::invalid_argument("CwDp: empty expression");
        }
        tables_.resize(expr.nodes.size());
        for (std::size_t x = 0; x < expr.nodes.size(); ++x) {
            tables_[x] = dp_node(x);
            stats_.dp_cells += tables_[x].size();
            for (const auto& [key, set] : tables_[x]) {
                stats_.profiles_stored += set.size();
            }
        }
        profiles_ = ProfileSet(k_, options_.profile_cap);
        for (const auto& [key, set] : tables_[expr.root()]) {
            profiles_.absorb(set);
        }
        if (options_.prune) {
            profiles_ = dominance_prune(profiles_);
        }
    }

    const ProfileSet& profiles() const { return profiles_; }
    const CwTable& table(std::size_t node) const { return tables_[node]; }
    const SolveStats& stats() const { return stats_; }

    /// Label profile as one label set (bitmask over [l]) per agent.
    std::vector<std::uint64_t> unpack(Key key) const
    {
        std::vector<std::uint64_t> out(k_);
        for (std::size_t s = 0; s < k_; ++s) {
            out[s] = (key >> (s * l_)) & label_mask();
        }
        return out;
    }

    Key pack(const std::vector<std::uint64_t>& sets) const
    {
        Key key = 0;
        for (std::size_t s = 0; s < k_; ++s) {
            key |= sets[s] << (s * l_);
        }
        return key;
    }

    /// A coloring of the whole graph whose profile is `target`.
    Coloring witness(const Profile& target) const
    {
        std::vector<std::size_t> color(inst_.n(), 0);
        std::optional<Key> start;
        for (const auto& [key, set] : sorted(tables_[expr_.root()])) {
            if (set->contains(target)) {
                start = key;
                break;
            }
        }
        if (!start) {
            throw std::invalid_argument("CwDp::witness: profile is not attainable");
        }
        struct Job {
            std::size_t node;
            Key key;
            Profile q;
        };
        std::vector<Job> todo{{expr_.root(), *start, target}};
        while (!todo.empty()) {
            Job job = std::move(todo.back());
            todo.pop_back();
            const auto& n = expr_.nodes[job.node];
            switch (n.kind) {
            case ExprNode::Kind::Vertex:
                for (std::size_t s = 0; s < k_; ++s) {
                    if ((job.key >> (s * l_)) & label_mask()) {
                        color[n.vertex] = s + 1;
                    }
                }
                break;
            case ExprNode::Kind::Eta:
                todo.push_back({n.left, job.key, job.q});
                break;
            case ExprNode::Kind::Rho: {
                bool found = false;
                for_each_rho_source(n, job.key, [&](Key source) {
                    if (found) {
                        return;
                    }
                    const auto it = tables_[n.left].find(source);
                    if (it != tables_[n.left].end() && it->second.contains(job.q)) {
                        todo.push_back({n.left, source, job.q});
                        found = true;
                    }
                });
                if (!found) {
                    throw std::logic_error("CwDp::witness: relabel step has no source");
                }
                break;
            }
            case ExprNode::Kind::Union: {
                bool found = false;
                Profile rest(k_);
                for (const auto& [k1, s1] : sorted(tables_[n.left])) {
                    for (const auto& [k2, s2] : sorted(tables_[n.right])) {
                        if ((k1 | k2) != job.key || found) {
                            continue;
                        }
                        for (std::size_t x = 0; x < s1->size() && !found; ++x) {
                            const auto q1 = (*s1)[x];
                            bool ok = true;
                            for (std::size_t j = 0; j < k_; ++j) {
                                rest[j] = job.q[j] - q1[j];
                                ok = ok && rest[j] >= 0;
                            }
                            if (ok && s2->contains(rest)) {
                                todo.push_back({n.left, k1, s1->at(x)});
                                todo.push_back({n.right, k2, rest});
                                found = true;
                            }
                        }
                    }
                }
                if (!found) {
                    throw std::logic_error("CwDp::witness: union step has no decomposition");
                }
                break;
            }
            }
        }
        return Coloring::from_assignment(color, k_);
    }

private:
    std::uint64_t label_mask() const { return l_ == 64 ? ~0ULL : ((1ULL << l_) - 1); }

    static std::vector<std::pair<Key, const ProfileSet*>> sorted(const CwTable& t)
    {
        std::vector<std::pair<Key, const ProfileSet*>> out;
        for (const auto& [key, set] : t) {
            out.emplace_back(key, &set);
        }
        std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        return out;
    }

    void store(CwTable& table, Key key, const ProfileSet& set) const
    {
        auto [it, fresh] = table.try_emplace(key, k_, options_.profile_cap);
        it->second.absorb(set);
    }

    /// Source label profiles of a relabel i -> j for target `key`: agents
    /// whose set holds j take L, (L \ {j}) + {i} or L + {i}; others keep L.
    template <typename Visit>
    void for_each_rho_source(const ExprNode& n, Key key, Visit&& visit) const
    {
        const std::uint64_t bi = 1ULL << (n.a - 1);
        const std::uint64_t bj = 1ULL << (n.b - 1);
        auto sets = unpack(key);
        std::vector<std::size_t> involved;
        for (std::size_t s = 0; s < k_; ++s) {
            if (sets[s] & bi) {
                return; // no coloring of the relabeled graph uses label i
            }
            if (sets[s] & bj) {
                involved.push_back(s);
            }
        }
        std::vector<std::uint64_t> choice(k_);
        std::vector<std::size_t> pick(involved.size(), 0);
        while (true) {
            auto source = sets;
            for (std::size_t x = 0; x < involved.size(); ++x) {
                const std::uint64_t L = sets[involved[x]];
                switch (pick[x]) {
                case 0: source[involved[x]] = L; break;
                case 1: source[involved[x]] = (L & ~bj) | bi; break;
                default: source[involved[x]] = L | bi; break;
                }
            }
            visit(pack(source));
            std::size_t x = 0;
            while (x < pick.size() && pick[x] == 2) {
                pick[x++] = 0;
            }
            if (x == pick.size()) {
                break;
            }
            ++pick[x];
        }
    }

    CwTable dp_node(std::size_t x)
    {
        const auto& n = expr_.nodes[x];
        CwTable out;
        switch (n.kind) {
        case ExprNode::Kind::Vertex: {
            if (n.vertex >= inst_.n()) {
                throw InvalidInput("expression vertex " + std::to_string(n.vertex + 1) + " is not in the instance");
            }
            out.emplace(0, ProfileSet::zero(k_, options_.profile_cap));
            for (std::size_t s = 0; s < k_; ++s) {
                Profile e(k_, 0);
                e[s] = inst_.profit(s, n.vertex);
                ProfileSet single(k_, options_.profile_cap);
                single.insert(e);
                out.emplace(Key{1} << (s * l_ + n.a - 1), std::move(single));
            }
            break;
        }
        case ExprNode::Kind::Union: {
            // Every pair of nonempty cells; empty cells contribute nothing.
            for (const auto& [k1, s1] : sorted(tables_[n.left])) {
                for (const auto& [k2, s2] : sorted(tables_[n.right])) {
                    stats_.combine_work += s1->size() * s2->size();
                    store(out, k1 | k2, merge_profile_sets(*s1, *s2));
                }
            }
            break;
        }
        case ExprNode::Kind::Eta: {
            const std::uint64_t both = (1ULL << (n.a - 1)) | (1ULL << (n.b - 1));
            for (const auto& [key, set] : tables_[n.left]) {
                bool ok = true;
                for (const auto L : unpack(key)) {
                    ok = ok && (L & both) != both;
                }
                if (ok) {
                    out.emplace(key, set);
                }
            }
            break;
        }
        case ExprNode::Kind::Rho: {
            const std::uint64_t bi = 1ULL << (n.a - 1);
            const std::uint64_t bj = 1ULL << (n.b - 1);
            // Targets reachable from some child cell, each assembled from
            // its deduplicated source cells.
            std::set<Key> targets;
            for (const auto& [key, set] : tables_[n.left]) {
                auto sets = unpack(key);
                for (auto& L : sets) {
                    if (L & bi) {
                        L = (L & ~bi) | bj;
                    }
                }
                targets.insert(pack(sets));
            }
            for (Key target : targets) {
                std::set<Key> sources;
                for_each_rho_source(n, target, [&](Key source) { sources.insert(source); });
                for (Key source : sources) {
                    const auto it = tables_[n.left].find(source);
                    if (it != tables_[n.left].end()) {
                        store(out, target, it->second);
                    }
                }
            }
            break;
        }
        }
        if (options_.prune) {
            for (auto& [key, set] : out) {
                set = dominance_prune(set);
            }
        }
        return out;
    }

    const Instance& inst_;
    const CliqueExpression& expr_;
    SolveOptions options_;
    std::size_t k_;
    std::size_t l_;
    std::vector<CwTable> tables_;
    ProfileSet profiles_;
    SolveStats stats_;
};

/// Solves over an expression that must build exactly the instance graph.
inline ExactResult solve_cliquewidth(const Instance& inst, const CliqueExpression& expr, SolveOptions options = {})
{
    if (auto mismatch = check_expression_matches(expr, inst)) {
        throw InvalidInput("expression does not build the instance graph: " + *mismatch);
    }
    ExactResult out{ProfileSet::zero(inst.k(), options.profile_cap), {}};
    Solution& sol = out.solution;
    sol.method = "cw";
    if (inst.n() == 0) {
        sol.profile = Profile(inst.k(), 0);
        sol.witness = Coloring::empty(inst.k());
        return out;
    }
    const CwDp dp(inst, expr, options);
    out.profiles = dp.profiles();
    sol.profile = best_profile(out.profiles);
    sol.optimum = satisfaction_level(sol.profile);
    sol.witness = dp.witness(sol.profile);
    sol.stats = dp.stats();
    certify(inst, sol);
    return out;
}

} // namespace fkd
