#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "popmatch/errors.hpp"

namespace popmatch {

using CandidateId = std::string;
using PmaId = std::string;

// Reserved id of the implicit root population that carries a PMA's capacity.
inline constexpr const char* kCapacityPopulationId = "__capacity__";

struct Candidate {
    CandidateId id;
    std::vector<PmaId> preferences;  // strict, most-preferred first, no duplicates
    std::map<std::string, std::string> attributes;
};

enum class PopulationKind { binary, multi_valued };

// A population as specified in the input: either an explicit member set
// (binary) or a value per member (multi_valued, shorthand for one disjoint
// binary population per distinct value).
struct RawPopulation {
    std::string id;
    std::string name;
    PopulationKind kind = PopulationKind::binary;
    std::vector<CandidateId> members;            // binary only
    std::map<CandidateId, std::string> values;   // multi_valued only
    int min_target = 0;
    std::optional<int> max_quota;                // absent = unbounded
    std::map<std::string, int> overrides;        // multi_valued: per-value max_quota
    bool is_gender = false;
};

// Post-expansion population: a plain member set with its constraints.
struct Population {
    std::string id;
    std::string name;
    std::vector<CandidateId> members;  // sorted, unique
    int min_target = 0;
    std::optional<int> max_quota;
    bool is_gender = false;

    bool contains(const CandidateId& c) const;
};

// One PMA's preference report. Ranks are nonnegative, lower = better, ties
// allowed; rank 0 means 0-priority and is legal only under 2019 semantics.
struct PreferenceReport {
    PmaId pma;
    int capacity = 0;
    std::map<CandidateId, int> ranking;
    std::vector<RawPopulation> populations;
};

struct Market {
    std::vector<Candidate> candidates;
    std::vector<PreferenceReport> reports;  // one per PMA
    std::uint64_t tie_break_seed = 0;

    const Candidate* find_candidate(const CandidateId& id) const;
    const PreferenceReport* find_report(const PmaId& id) const;
};

// Partial assignment of candidates to PMAs.
class Matching {
public:
    Matching() = default;

    void assign(const CandidateId& c, const PmaId& m) { assignment_[c] = m; }
    void unassign(const CandidateId& c) { assignment_.erase(c); }
    std::optional<PmaId> pma_of(const CandidateId& c) const;
    std::vector<CandidateId> candidates_of(const PmaId& m) const;
    std::size_t size() const { return assignment_.size(); }
    bool empty() const { return assignment_.empty(); }
    const std::map<CandidateId, PmaId>& assignment() const { return assignment_; }

    bool operator==(const Matching&) const = default;

private:
    std::map<CandidateId, PmaId> assignment_;
};

struct Violation {
    std::string code;     // dangling_reference | duplicate_id | rank_zero |
                          // target_exceeds_quota | member_unranked | bad_capacity |
                          // duplicate_preference | expansion_collision
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

enum class ChoiceKind { y2018, prefer_more, prefer_more_staged, y2019 };

std::string to_string(ChoiceKind kind);
ChoiceKind choice_kind_from_string(const std::string& s);

// Rule driving auto-population: one multi_valued population per attribute.
struct AutoPopulationRule {
    std::string attribute;
    std::string id;  // population id; defaults to "auto:" + attribute
    int min_target = 0;
    std::optional<int> max_quota;
    std::map<std::string, int> overrides;  // per value
    bool is_gender = false;
};

// --- Operations ------------------------------------------------------------

// Expands multi_valued populations into one binary population per distinct
// value (id "<id>=<value>"), inheriting min_target and max_quota unless a
// per-value override applies. Throws ValidationError on id collisions.
std::vector<Population> expand_populations(const std::vector<RawPopulation>& raw);

// Builds one multi_valued RawPopulation per rule over the given candidates.
// Throws ValidationError naming candidate and attribute when an attribute is
// missing.
std::vector<RawPopulation> auto_populate(const std::vector<Candidate>& candidates,
                                         const std::vector<AutoPopulationRule>& rules);

// Checks every market invariant; violations are data, not failures. Rank 0 is
// flagged unless `kind` is y2019.
ValidationReport validate(const Market& market,
                          std::optional<ChoiceKind> kind = std::nullopt);

// --- Strict (tie-broken) views ----------------------------------------------

// One PMA's report compiled against a total strict order over its ranked
// candidates. This is the object the choice functions evaluate.
class StrictReport {
public:
    StrictReport() = default;

    const PmaId& pma() const { return pma_; }
    int capacity() const { return capacity_; }
    const std::vector<Population>& populations() const { return populations_; }
    // Ranked candidates, best first.
    const std::vector<CandidateId>& order() const { return order_; }

    bool ranks(const CandidateId& c) const { return local_.count(c) != 0; }
    // Position in the strict order; smaller = better.
    std::size_t position_of(const CandidateId& c) const;

    // Internal layout used by the choice evaluator.
    struct PopInfo {
        std::string id;
        int min_target = 0;
        long long max_quota = 0;  // LLONG_MAX when unbounded
        bool is_gender = false;
    };
    struct MemberInfo {
        std::uint32_t position = 0;
        int rank = 0;
        std::vector<std::uint16_t> pops;  // declared pops ascending, then root
    };
    // Declared populations in report order, root last.
    const std::vector<PopInfo>& pop_infos() const { return pop_infos_; }
    const MemberInfo* member(const CandidateId& c) const;
    std::size_t root_pop() const { return pop_infos_.size() - 1; }

    friend StrictReport make_strict_report(const PreferenceReport&,
                                           const std::vector<CandidateId>&);

private:
    PmaId pma_;
    int capacity_ = 0;
    std::vector<Population> populations_;
    std::vector<CandidateId> order_;
    std::vector<PopInfo> pop_infos_;
    std::unordered_map<CandidateId, MemberInfo> local_;
};

// Compiles a report against an explicit strict order (best first). The order
// must cover exactly the ranked candidates and refine the weak ranking.
StrictReport make_strict_report(const PreferenceReport& report,
                                const std::vector<CandidateId>& strict_order);

// A market with every PMA's ties resolved by one global random permutation
// (single tie-breaking), drawn from mt19937_64 seeded with tie_break_seed.
struct StrictMarket {
    Market market;
    // The drawn permutation, best priority first.
    std::vector<CandidateId> tie_break_permutation;
    std::vector<StrictReport> reports;  // parallel to market.reports

    const StrictReport* find_report(const PmaId& id) const;
    std::size_t candidate_count() const { return market.candidates.size(); }

    // Position of a PMA on a candidate's list; npos when unlisted.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t preference_position(const CandidateId& c, const PmaId& m) const;
    // True when the candidate strictly prefers `m` to their current
    // assignment (unmatched counts as worst).
    bool prefers_over_assignment(const CandidateId& c, const PmaId& m,
                                 const Matching& matching) const;

    // Cached lookup tables, built once.
    std::unordered_map<CandidateId, std::size_t> candidate_index;
    std::unordered_map<PmaId, std::size_t> pma_index;
    std::unordered_map<CandidateId, std::unordered_map<PmaId, std::size_t>> pref_position;
};

// Draws the single tie-breaking permutation and compiles every report.
// Pure function of (market, market.tie_break_seed).
StrictMarket apply_tie_breaking(const Market& market);

}  // namespace popmatch
