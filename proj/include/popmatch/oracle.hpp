#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "popmatch/engine.hpp"
#include "popmatch/market.hpp"

namespace popmatch::oracle {

// The counterexample instances, reconstructed exactly.
enum class FixtureId { thm3_no_stable, thm3_strategyproofness, footnote26_free_slot };

Market fixture(FixtureId id);

struct BruteForceBounds {
    int max_candidates = 8;
    int max_pmas = 4;
};

// Enumerates every assignment of each candidate to (listed PMAs or nothing)
// and keeps those that are individually rational with zero blocking pairs.
// Refuses (BoundExceeded) above the bounds: an oracle that silently samples
// is not an oracle.
std::vector<Matching> brute_force_stable_matchings(const StrictMarket& market,
                                                   ChoiceKind kind,
                                                   BruteForceBounds bounds = {});

// Independent blocking-pair enumeration (kept deliberately separate from the
// audit module so the two can be checked against each other).
std::vector<std::pair<CandidateId, PmaId>> enumerate_blocking_pairs(
    const StrictMarket& market, ChoiceKind kind, const Matching& matching);

bool is_stable(const StrictMarket& market, ChoiceKind kind, const Matching& matching);

struct PropertyViolation {
    std::string property;  // substitutability | irc | lad | one_removal
    std::vector<CandidateId> subset;
    CandidateId removed;
    std::vector<CandidateId> chosen_full;
    std::vector<CandidateId> chosen_reduced;
};

struct PropertyReport {
    int subsets_checked = 0;
    std::vector<PropertyViolation> violations;
    bool clean() const { return violations.empty(); }
    const PropertyViolation* first(const std::string& property) const;
};

// For every subset C of the universe and every c in C, compares choice(C)
// with choice(C \ {c}) against substitutability, irrelevance of rejected
// contracts, the law of aggregate demand, and the one-removal form
// (the reduced choice equals the full one minus c, possibly plus one other).
PropertyReport check_choice_properties(const StrictReport& report, ChoiceKind kind,
                                       int max_universe = 7);

struct Manipulation {
    std::vector<PmaId> misreport;
    std::optional<PmaId> truthful_outcome;
    std::optional<PmaId> manipulated_outcome;  // strictly preferred under true prefs
};

struct ManipulationReport {
    CandidateId candidate;
    int lists_tried = 0;
    std::vector<Manipulation> profitable;
    bool clean() const { return profitable.empty(); }
};

// Runs the pipeline for every ordered sublist of the candidate's true
// acceptable set and reports any list yielding a strictly preferred outcome
// under the true preferences. Refuses when the acceptable set exceeds the
// bound.
ManipulationReport check_strategyproofness_exhaustive(const Market& market,
                                                      const PipelineConfig& config,
                                                      const CandidateId& candidate,
                                                      int max_acceptable = 4);

struct TruncationViolation {
    CandidateId candidate;
    int prefix_length = 0;
    PmaId truncated_outcome;
    std::optional<PmaId> full_outcome;
};

struct TruncationReport {
    int runs = 0;
    std::vector<TruncationViolation> violations;
    bool clean() const { return violations.empty(); }
};

// For every candidate and every proper prefix of their list: a PMA obtained
// under the truncated list must also be obtained under the full list.
TruncationReport check_truncation_safety(const Market& market, const PipelineConfig& config);

struct SureThingReport {
    bool applicable = false;  // guarantee precondition verified
    std::string reason;       // when inapplicable
    int lists_tried = 0;
    struct Violation {
        std::vector<PmaId> list;
        std::optional<PmaId> outcome;
    };
    std::vector<Violation> violations;
    bool clean() const { return violations.empty(); }
};

// Precondition (verified by subset enumeration): the PMA chooses the
// candidate from every subset of its ranked set containing them. Then every
// submitted list containing that PMA must land the candidate there or higher
// on the submitted list.
SureThingReport check_sure_thing(const Market& market, const PipelineConfig& config,
                                 const CandidateId& candidate, const PmaId& pma,
                                 int max_ranked_for_guarantee = 14, int max_acceptable = 4);

}  // namespace popmatch::oracle
