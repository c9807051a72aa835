#pragma once

#include "fkd/instance.hpp"
#include "fkd/profile_set.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fkd {

struct SolveOptions {
    /// Per-set profile limit.
    std::size_t profile_cap = kDefaultProfileCap;
    /// Keep only Pareto-maximal profiles in DP tables. Optimum and witness
    /// stay exact; the reported profile sets no longer are.
    bool prune = false;
    std::size_t threads = 1;
};

struct SolveStats {
    /// Table cells (guess tuples, label profiles, bag colorings) materialized.
    std::uint64_t dp_cells = 0;
    /// Sum of the sizes of all retained profile sets.
    std::uint64_t profiles_stored = 0;
    /// Candidate profiles generated by vector additions.
    std::uint64_t combine_work = 0;
};

struct Solution {
    Profit optimum = 0;
    Profile profile;
    Coloring witness;
    std::string method;
    SolveStats stats;
};

/// Exact solvers report the full profile set alongside the optimum.
struct ExactResult {
    ProfileSet profiles;
    Solution solution;
};

/// Checks a witness against the instance and the claimed profile; a failure
/// here is a bug in the solver, not an input problem.
inline void certify(const Instance& inst, const Solution& sol)
{
    if (auto err = validate_coloring(inst, sol.witness)) {
        throw std::logic_error(sol.method + ": witness is not a partial coloring: " + *err);
    }
    if (profile_of(inst, sol.witness) != sol.profile) {
        throw std::logic_error(sol.method + ": witness profile does not match the reported profile");
    }
    if (satisfaction_level(sol.profile) != sol.optimum) {
        throw std::logic_error(sol.method + ": reported optimum differs from the profile minimum");
    }
}

/// Runs body(i) for i in [0, count), split into contiguous blocks over up to
/// `threads` workers. The first exception thrown by any worker is rethrown.
inline void parallel_for(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t)>& body)
{
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    const std::size_t block = (count + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = w * block;
            const std::size_t hi = std::min(count, lo + block);
            try {
                for (std::size_t i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                std::lock_guard lock(guard);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

/// Merges per-part profile sets by vector addition and keeps every prefix so
/// a target profile of the merged set can be split back into parts.
class MergedParts {
public:
    MergedParts(std::size_t arity, std::size_t cap, bool prune)
        : prefixes_{ProfileSet::zero(arity, cap)}, prune_(prune)
    {
    }

    void add(ProfileSet part, SolveStats* stats = nullptr)
    {
        if (stats) {
            stats->combine_work += prefixes_.back().size() * part.size();
        }
        ProfileSet merged = merge_profile_sets(prefixes_.back(), part);
        if (prune_) {
            merged = dominance_prune(merged);
        }
        parts_.push_back(std::move(part));
        prefixes_.push_back(std::move(merged));
    }

    const ProfileSet& result() const { return prefixes_.back(); }
    std::size_t parts() const { return parts_.size(); }

    /// Splits `target` (a member of result()) into one profile per part.
    std::vector<Profile> split(const Profile& target) const
    {
        std::vector<Profile> out(parts_.size());
        Profile rest = target;
        Profile scratch(rest.size());
        for (std::size_t c = parts_.size(); c-- > 0;) {
            bool found = false;
            for (std::size_t i = 0; i < parts_[c].size() && !found; ++i) {
                const auto q = parts_[c][i];
                bool ok = true;
                for (std::size_t j = 0; j < rest.size(); ++j) {
                    scratch[j] = rest[j] - q[j];
                    ok = ok && scratch[j] >= 0;
                }
                if (ok && prefixes_[c].contains(scratch)) {
                    out[c] = parts_[c].at(i);
                    rest = scratch;
                    found = true;
                }
            }
            if (!found) {
                throw std::logic_error("MergedParts::split: target not decomposable");
            }
        }
        return out;
    }

private:
    std::vector<ProfileSet> prefixes_;
    std::vector<ProfileSet> parts_;
    bool prune_;
};

} // namespace fkd
