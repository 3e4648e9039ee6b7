#pragma once

#include <optional>
#include <string>
#include <vector>

#include "popmatch/choice.hpp"
#include "popmatch/market.hpp"

namespace popmatch {

enum class BlockingClass { real, tie_break_artifact };

std::string to_string(BlockingClass c);

struct BlockingPair {
    CandidateId candidate;
    PmaId pma;
    // Choice evaluation over assigned(pma) + candidate that chose the candidate.
    std::vector<CandidateId> chosen;
    AcceptPass accept_pass = AcceptPass::regular;
    BlockingClass classification = BlockingClass::real;
};

enum class ExplanationCategory {
    did_not_rank,
    matched_to_preferred,
    quota_violation,
    displaced_by_promotion,
    blocking_pair,  // extension: the evaluation chooses the candidate
};

std::string to_string(ExplanationCategory c);

struct Explanation {
    CandidateId candidate;
    PmaId pma;
    ExplanationCategory category = ExplanationCategory::did_not_rank;
    std::string detail;  // violated population id, or promotion pass name
};

struct IrViolation {
    std::string code;  // unlisted_assignment | pma_rejects_assignee
    CandidateId candidate;
    PmaId pma;
};

struct IrReport {
    bool ok = true;
    std::vector<IrViolation> witnesses;
};

struct PopulationUsage {
    PmaId pma;
    std::string population;
    int min_target = 0;
    std::optional<int> max_quota;
    int assigned = 0;
    bool target_met = true;
};

struct OutcomeStats {
    int candidates = 0;
    int candidates_with_preferences = 0;
    int matched = 0;
    double top_choice_fraction = 0.0;  // among matched candidates
    int slots_total = 0;
    double slots_filled_fraction = 0.0;
    int blocking_total = 0;
    int blocking_real = 0;
    int blocking_tie_break_artifact = 0;
    int blocking_distinct_pmas = 0;
    std::vector<PopulationUsage> populations;
};

// True iff every assignment is on the candidate's list and every PMA's choice
// over its own assignees keeps all of them.
IrReport is_individually_rational(const StrictMarket& market, ChoiceKind kind,
                                  const Matching& matching);

// Complete enumeration: for every candidate and every PMA they strictly
// prefer to their assignment, evaluates choice(assigned + candidate) and
// reports the pair when the candidate is chosen. Classification is filled via
// classify_blocking_pair. OpenMP kernel; the serial reference below produces
// identical output and is kept for testing.
std::vector<BlockingPair> find_blocking_pairs(const StrictMarket& market, ChoiceKind kind,
                                              const Matching& matching);
std::vector<BlockingPair> find_blocking_pairs_serial(const StrictMarket& market,
                                                     ChoiceKind kind,
                                                     const Matching& matching);

// Re-breaks ties maximally against the claim (blocking candidate last in its
// tie class, incumbents first in theirs) and re-evaluates: still chosen ->
// real, otherwise an artifact of the drawn tie-breaking.
BlockingClass classify_blocking_pair(const StrictMarket& market, ChoiceKind kind,
                                     const Matching& matching, const CandidateId& candidate,
                                     const PmaId& pma);

// Why is `candidate`, ranked by `pma`, not assigned to it? Throws QueryError
// unless pma ranks the candidate and the candidate is assigned elsewhere (or
// unmatched).
Explanation explain_rejection(const StrictMarket& market, ChoiceKind kind,
                              const Matching& matching, const PmaId& pma,
                              const CandidateId& candidate);

// The full report: one explanation per (pma, ranked candidate above any
// assigned one) query.
std::vector<Explanation> explain_all(const StrictMarket& market, ChoiceKind kind,
                                     const Matching& matching);

OutcomeStats summarize(const StrictMarket& market, const Matching& matching,
                       const std::vector<BlockingPair>& pairs);

// Free-slot blocking pairs only: choice(assigned + candidate) keeps the whole
// set. These are exactly what the candidate Pareto stage resolves.
std::vector<std::pair<PmaId, CandidateId>> find_free_slot_blocking_pairs(
    const StrictMarket& market, ChoiceKind kind, const Matching& matching);

}  // namespace popmatch
