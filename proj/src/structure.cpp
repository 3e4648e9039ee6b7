#include "popmatch/structure.hpp"

#include <algorithm>

namespace popmatch {

std::string to_string(Guarantee g) {
    switch (g) {
        case Guarantee::stable_and_strategyproof_alg1: return "stable_and_strategyproof_alg1";
        case Guarantee::stable_and_strategyproof_alg2: return "stable_and_strategyproof_alg2";
        case Guarantee::none: return "none";
    }
    return "?";
}

namespace {

// Members are sorted, so set relations are linear merges.
struct Relation {
    bool a_minus_b = false;
    bool b_minus_a = false;
    bool common = false;
    CandidateId wa, wb, wc;  // witnesses for each region
};

Relation relate(const Population& a, const Population& b) {
    Relation rel;
    std::size_t i = 0, j = 0;
    while (i < a.members.size() || j < b.members.size()) {
        if (j == b.members.size() || (i < a.members.size() && a.members[i] < b.members[j])) {
            if (!rel.a_minus_b) rel.wa = a.members[i];
            rel.a_minus_b = true;
            ++i;
        } else if (i == a.members.size() || b.members[j] < a.members[i]) {
            if (!rel.b_minus_a) rel.wb = b.members[j];
            rel.b_minus_a = true;
            ++j;
        } else {
            if (!rel.common) rel.wc = a.members[i];
            rel.common = true;
            ++i;
            ++j;
        }
    }
    return rel;
}

bool subset_of(const Population& a, const Population& b) {
    return std::includes(b.members.begin(), b.members.end(), a.members.begin(),
                         a.members.end());
}

// Union of pairwise-disjoint chains, evaluated on the min-target subfamily
// alone: every two are comparable or disjoint, and none contains two
// incomparable ones.
bool chains_subfamily(const std::vector<Population>& populations,
                      std::optional<ChainWitness>* witness) {
    std::vector<const Population*> targets;
    for (const auto& p : populations)
        if (p.min_target > 0) targets.push_back(&p);

    for (std::size_t i = 0; i < targets.size(); ++i)
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            const auto rel = relate(*targets[i], *targets[j]);
            if (rel.common && rel.a_minus_b && rel.b_minus_a) {
                if (witness) *witness = ChainWitness{"", targets[i]->id, targets[j]->id};
                return false;
            }
        }
    for (const auto* p : targets)
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (targets[i] == p || !subset_of(*targets[i], *p)) continue;
            for (std::size_t j = i + 1; j < targets.size(); ++j) {
                if (targets[j] == p || !subset_of(*targets[j], *p)) continue;
                if (!subset_of(*targets[i], *targets[j]) &&
                    !subset_of(*targets[j], *targets[i])) {
                    if (witness)
                        *witness = ChainWitness{p->id, targets[i]->id, targets[j]->id};
                    return false;
                }
            }
        }
    return true;
}

}  // namespace

bool is_laminar(const std::vector<Population>& populations,
                std::optional<LaminarWitness>* witness) {
    for (std::size_t i = 0; i < populations.size(); ++i)
        for (std::size_t j = i + 1; j < populations.size(); ++j) {
            const auto rel = relate(populations[i], populations[j]);
            if (rel.common && rel.a_minus_b && rel.b_minus_a) {
                if (witness)
                    *witness = LaminarWitness{populations[i].id, populations[j].id, rel.wa,
                                              rel.wc, rel.wb};
                return false;
            }
        }
    return true;
}

bool min_targets_pairwise_disjoint(const std::vector<Population>& populations,
                                   std::optional<IntersectionWitness>* witness) {
    std::vector<const Population*> targets;
    for (const auto& p : populations)
        if (p.min_target > 0) targets.push_back(&p);
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            const auto rel = relate(*targets[i], *targets[j]);
            if (rel.common) {
                if (witness)
                    *witness = IntersectionWitness{targets[i]->id, targets[j]->id, rel.wc};
                return false;
            }
        }
    return true;
}

bool min_targets_disjoint_chains(const std::vector<Population>& populations,
                                 std::optional<ChainWitness>* witness) {
    if (!is_laminar(populations))
        throw ValidationError("chain structure undefined: population family is not laminar");
    return chains_subfamily(populations, witness);
}

StructureReport guarantees(const Market& market, ChoiceKind kind) {
    StructureReport report;
    report.kind = kind;
    bool all_laminar = true;
    bool all_disjoint = true;
    bool all_chains = true;

    for (const auto& r : market.reports) {
        PmaStructure ps;
        ps.pma = r.pma;
        const auto pops = expand_populations(r.populations);
        ps.laminar = is_laminar(pops, &ps.laminar_witness);
        ps.min_targets_pairwise_disjoint =
            min_targets_pairwise_disjoint(pops, &ps.disjoint_witness);
        ps.min_targets_disjoint_chains = chains_subfamily(pops, &ps.chain_witness);
        all_laminar = all_laminar && ps.laminar;
        all_disjoint = all_disjoint && ps.min_targets_pairwise_disjoint;
        all_chains = all_chains && ps.min_targets_disjoint_chains;
        report.pmas.push_back(std::move(ps));
    }

    report.guarantee = Guarantee::none;
    if (kind == ChoiceKind::y2018 && all_laminar && all_disjoint)
        report.guarantee = Guarantee::stable_and_strategyproof_alg1;
    else if ((kind == ChoiceKind::prefer_more || kind == ChoiceKind::prefer_more_staged) &&
             all_laminar && all_chains)
        report.guarantee = Guarantee::stable_and_strategyproof_alg2;
    return report;
}

}  // namespace popmatch
