#pragma once

// Profit scaling around an exact pseudo-polynomial solver.

#include "fkd/error.hpp"
#include "fkd/instance.hpp"
#include "fkd/solution.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fkd {

namespace detail {
__extension__ typedef __int128 Wide;
} // namespace detail

/// A rational in (0, 1).
struct Epsilon {
    std::int64_t num = 1;
    std::int64_t den = 2;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Accepts "a/b" or a decimal such as "0.25".
inline Epsilon parse_epsilon(std::string_view text)
{
    Epsilon e;
    const std::string s(text);
    try {
        if (const auto slash = s.find('/'); slash != std::string::npos) {
            std::size_t used_a = 0, used_b = 0;
            e.num = std::stoll(s.substr(0, slash), &used_a);
            e.den = std::stoll(s.substr(slash + 1), &used_b);
            if (used_a != slash || used_b != s.size() - slash - 1) {
                throw InvalidInput("bad epsilon '" + s + "'");
            }
        } else {
            const auto dot = s.find('.');
            const std::string whole = dot == std::string::npos ? s : s.substr(0, dot);
            const std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
            if (frac.size() > 15 || (whole.empty() && frac.empty()) ||
                s.find_first_not_of("0123456789.") != std::string::npos || s.find('.', dot + 1) != std::string::npos) {
                throw InvalidInput("bad epsilon '" + s + "'");
            }
            e.den = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) {
                e.den *= 10;
            }
            e.num = (whole.empty() ? 0 : std::stoll(whole)) * e.den + (frac.empty() ? 0 : std::stoll(frac));
        }
    } catch (const std::logic_error&) {
        throw InvalidInput("bad epsilon '" + s + "'");
    }
    if (e.den <= 0 || e.num <= 0 || e.num >= e.den) {
        throw InvalidInput("epsilon must lie strictly between 0 and 1, got '" + s + "'");
    }
    return e;
}

/// Same graph, profits floor-divided by K.
inline Instance scale_profits(const Instance& inst, Profit K)
{
    if (K < 1) {
        throw std::invalid_argument("scale factor must be at least 1");
    }
    auto profits = inst.profits();
    for (auto& row : profits) {
        for (auto& p : row) {
            p /= K;
        }
    }
    return Instance(inst.n(), inst.edges(), std::move(profits));
}

struct FptasResult {
    /// Scored with the original profits.
    Solution solution;
    Epsilon epsilon;
    std::size_t solver_calls = 0;
    /// Guess and scale of the accepted round; 0 when no round was accepted.
    Profit accepted_guess = 0;
    Profit scale = 1;
};

using ExactSolver = std::function<Solution(const Instance&)>;

/// Tries g = Q, ceil(Q/2), ..., 1 with K = max(1, floor(eps*g/(2n))) and
/// accepts the first witness whose true satisfaction reaches (1-eps)*g.
inline FptasResult fptas(const Instance& inst, Epsilon eps, const ExactSolver& solve)
{
    if (eps.num <= 0 || eps.den <= 0 || eps.num >= eps.den) {
        throw InvalidInput("epsilon must lie strictly between 0 and 1");
    }
    FptasResult out;
    out.epsilon = eps;
    out.solution.method = "approx";
    out.solution.profile = Profile(inst.k(), 0);
    out.solution.witness = Coloring::empty(inst.k());
    const Profit Q = max_total_profit(inst);
    const auto n = static_cast<detail::Wide>(inst.n());
    for (Profit g = Q; g >= 1; g = g == 1 ? 0 : (g + 1) / 2) {
        detail::Wide K = static_cast<detail::Wide>(eps.num) * g / (2 * n * eps.den);
        if (K < 1) {
            K = 1;
        }
        const Instance scaled = K == 1 ? inst : scale_profits(inst, static_cast<Profit>(K));
        Solution sol = solve(scaled);
        ++out.solver_calls;
        out.solution.stats.dp_cells += sol.stats.dp_cells;
        out.solution.stats.profiles_stored += sol.stats.profiles_stored;
        out.solution.stats.combine_work += sol.stats.combine_work;
        const Profile truth = profile_of(inst, sol.witness);
        const Profit s = satisfaction_level(truth);
        if (s > out.solution.optimum) {
            out.solution.optimum = s;
            out.solution.profile = truth;
            out.solution.witness = sol.witness;
            out.scale = static_cast<Profit>(K);
        }
        if (static_cast<detail::Wide>(s) * eps.den >= static_cast<detail::Wide>(eps.den - eps.num) * g) {
            out.solution.optimum = s;
            out.solution.profile = truth;
            out.solution.witness = sol.witness;
            out.accepted_guess = g;
            out.scale = static_cast<Profit>(K);
            break;
        }
    }
    if (out.solution.optimum == 0) {
        out.solution.profile = Profile(inst.k(), 0);
        out.solution.witness = Coloring::empty(inst.k());
    }
    certify(inst, out.solution);
    return out;
}

} // namespace fkd
