#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "popmatch/market.hpp"

namespace popmatch::synth {

enum class GenMode { laminar_disjoint_targets, laminar_chain_targets, arbitrary_intersecting };

std::string to_string(GenMode mode);
GenMode gen_mode_from_string(const std::string& s);

struct GenConfig {
    int candidates = 8;
    int pmas = 3;
    int slots_min = 1;
    int slots_max = 3;
    std::optional<int> total_slots;  // exact total capacity when set
    GenMode mode = GenMode::arbitrary_intersecting;
    int pops_min = 0;
    int pops_max = 3;
    double min_target_density = 0.6;  // P(population carries a minimum target)
    double max_quota_density = 0.5;   // P(population carries a maximum quota)
    double alpha = 0.5;               // common-value weight of scores
    int list_min = 1;
    int list_max = 3;
    double tie_probability = 0.25;
    std::uint64_t seed = 0;
};

// Deterministic in (config, config.seed). Candidate and PMA scores are
// alpha * common + (1 - alpha) * idiosyncratic on both sides; the structural
// mode is enforced by construction and re-checked through the structure
// module before returning. Output always passes validate().
Market generate(const GenConfig& config);

// Single-PMA convenience for report-level suites: the PMA ranks the whole
// universe (with ties per tie_probability) and carries mode-shaped
// populations. Capacity is drawn in [1, candidates].
struct GeneratedReport {
    PreferenceReport report;
    std::vector<CandidateId> universe;
    StrictReport strict;
};

GeneratedReport generate_report(const GenConfig& config);

}  // namespace popmatch::synth
