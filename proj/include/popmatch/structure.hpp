#pragma once

#include <optional>
#include <string>
#include <vector>

#include "popmatch/market.hpp"

namespace popmatch {

// Pair of populations that are neither disjoint nor nested, with the three
// separating candidates.
struct LaminarWitness {
    std::string pop_a;
    std::string pop_b;
    CandidateId only_a;
    CandidateId shared;
    CandidateId only_b;
};

struct IntersectionWitness {
    std::string pop_a;
    std::string pop_b;
    CandidateId shared;
};

// Minimum-target population containing two incomparable minimum-target
// populations (or two incomparable, intersecting min-target populations when
// no container exists).
struct ChainWitness {
    std::string container;  // empty when the violation is a bare intersection
    std::string pop_a;
    std::string pop_b;
};

enum class Guarantee { stable_and_strategyproof_alg1, stable_and_strategyproof_alg2, none };

std::string to_string(Guarantee g);

struct PmaStructure {
    PmaId pma;
    bool laminar = true;
    std::optional<LaminarWitness> laminar_witness;
    bool min_targets_pairwise_disjoint = true;
    std::optional<IntersectionWitness> disjoint_witness;
    bool min_targets_disjoint_chains = true;
    std::optional<ChainWitness> chain_witness;
};

struct StructureReport {
    ChoiceKind kind = ChoiceKind::y2018;
    Guarantee guarantee = Guarantee::none;
    std::vector<PmaStructure> pmas;
};

// Every two populations disjoint or nested. Witness = first violating pair in
// canonical (input) order.
bool is_laminar(const std::vector<Population>& populations,
                std::optional<LaminarWitness>* witness = nullptr);

// Every two populations with positive minimum targets are disjoint.
bool min_targets_pairwise_disjoint(const std::vector<Population>& populations,
                                   std::optional<IntersectionWitness>* witness = nullptr);

// The positive-minimum-target populations form a union of pairwise-disjoint
// chains. Throws ValidationError when the full family is not laminar.
bool min_targets_disjoint_chains(const std::vector<Population>& populations,
                                 std::optional<ChainWitness>* witness = nullptr);

// Per-PMA flags plus the market-level guarantee earned under `kind`.
StructureReport guarantees(const Market& market, ChoiceKind kind);

}  // namespace popmatch
