#pragma once

#include <optional>
#include <string>
#include <vector>

#include "popmatch/market.hpp"

namespace popmatch {

// Pass in which a candidate was accepted.
enum class AcceptPass { zero_priority, min_target, gender_min_target, regular, committed };

std::string to_string(AcceptPass pass);

struct ChoiceTraceEntry {
    CandidateId candidate;
    bool accepted = false;
    AcceptPass pass = AcceptPass::regular;  // meaningful when accepted
    int accept_seq = -1;                    // acceptance order, 0-based
    std::string rejected_by;                // first violated population id when rejected
    // Set when the rejection was by the capacity root while a promoted
    // candidate ranked below this one held a slot; names that candidate's pass.
    std::optional<AcceptPass> crowded_by_promotion;
};

struct ChoiceResult {
    std::vector<CandidateId> chosen;        // in acceptance order
    std::vector<ChoiceTraceEntry> trace;    // in strict order over the evaluated set
    // Populations whose quota the committed pre-load already exceeds.
    std::vector<std::string> preload_violations;

    bool contains(const CandidateId& c) const;
    const ChoiceTraceEntry* entry(const CandidateId& c) const;
};

// The four choice-function semantics. Input must be a subset of the report's
// ranked candidates; the strict order is the one compiled into the report.
// All of them throw SemanticsError when a rank-0 candidate appears outside
// y2019.

// Two passes: first candidates helping an unmet minimum target, then the
// rest; every acceptance requires that no maximum quota (capacity included)
// is exceeded.
ChoiceResult choose_2018(const StrictReport& report,
                         const std::vector<CandidateId>& input);

// Repeatedly picks, among undecided candidates, the best-ranked one with the
// most unmet-minimum-target populations; quota-violating picks are rejected
// permanently.
ChoiceResult choose_prefer_more(const StrictReport& report,
                                const std::vector<CandidateId>& input);

// Staged formulation of choose_prefer_more: one pass per unmet-count level,
// descending. Returns the same chosen set on every input.
ChoiceResult choose_prefer_more_staged(const StrictReport& report,
                                       const std::vector<CandidateId>& input);

// Four passes: 0-priority (unconditional, quotas may be exceeded), unmet
// non-gender targets, unmet gender targets, everyone else.
ChoiceResult choose_2019(const StrictReport& report,
                         const std::vector<CandidateId>& input);

ChoiceResult choose(const StrictReport& report, ChoiceKind kind,
                    const std::vector<CandidateId>& input);

// Runs the selected semantics with the accumulator pre-loaded with
// `committed` (counting toward quotas and targets); only `applicants` are
// traversed and committed members are always retained.
ChoiceResult choose_with_committed(const StrictReport& report, ChoiceKind kind,
                                   const std::vector<CandidateId>& committed,
                                   const std::vector<CandidateId>& applicants);

}  // namespace popmatch
