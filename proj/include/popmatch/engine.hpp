#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popmatch/choice.hpp"
#include "popmatch/market.hpp"

namespace popmatch {

struct RoundEntry {
    std::map<CandidateId, PmaId> applications;
    std::map<PmaId, std::vector<CandidateId>> rejections;
};

struct StageResolution {
    enum class Stage { candidate, pma };
    Stage stage = Stage::candidate;
    PmaId pma;
    CandidateId assigned;
    std::optional<CandidateId> displaced;  // pma stage only
};

struct MatchOutcome {
    Matching matching;
    std::vector<RoundEntry> rounds;
    std::vector<StageResolution> stage_log;
    bool alternation_cap_hit = false;
    bool stage_cap_hit = false;
};

enum class ParetoMode { none, candidate_only, alternate };

std::string to_string(ParetoMode mode);
ParetoMode pareto_mode_from_string(const std::string& s);

struct PipelineConfig {
    ChoiceKind kind = ChoiceKind::y2018;
    ParetoMode pareto = ParetoMode::none;
    int alternation_cap = 100;
};

// Candidate-proposing deferred acceptance. Each round every candidate with a
// nonempty remaining list applies to their best not-yet-rejecting PMA; each
// PMA re-evaluates its full applicant set through its choice function and
// rejects the rest. Terminates on the first rejection-free round.
// Per-PMA choice evaluations within a round run under OpenMP when `parallel`.
MatchOutcome run_da(const StrictMarket& market, ChoiceKind kind, bool parallel = true);

struct StageResult {
    Matching matching;
    std::vector<StageResolution> resolutions;
    bool cap_hit = false;
};

// Resolves free-slot blocking pairs to fixpoint: while some PMA's choice on
// its assignees plus an outside candidate keeps the whole set, assign that
// candidate (PMAs scanned in market order, candidate = best-ranked eligible).
StageResult candidate_pareto_stage(const StrictMarket& market, ChoiceKind kind,
                                   const Matching& matching);

// One-for-one swaps: an unassigned candidate replaces exactly one incumbent
// whom no PMA later on their own list ranks. Resolution count is capped
// (flagged via cap_hit) since termination of this stage is not guaranteed.
StageResult pma_pareto_stage(const StrictMarket& market, ChoiceKind kind,
                             const Matching& matching);

// DA followed by the configured Pareto stages: none, candidate stage to
// fixpoint, or candidate/PMA alternation until a full alternation changes
// nothing or alternation_cap is hit.
MatchOutcome run_pipeline(const StrictMarket& market, const PipelineConfig& config);

// Immediate-acceptance baseline: in round k every still-unassigned candidate
// applies to the k-th PMA on their list, and PMAs accept permanently through
// choose_with_committed.
Matching run_boston(const StrictMarket& market, ChoiceKind kind);

}  // namespace popmatch
