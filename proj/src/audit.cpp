#include "popmatch/audit.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace popmatch {

std::string to_string(BlockingClass c) {
    return c == BlockingClass::real ? "real" : "tie_break_artifact";
}

std::string to_string(ExplanationCategory c) {
    switch (c) {
        case ExplanationCategory::did_not_rank: return "did_not_rank";
        case ExplanationCategory::matched_to_preferred: return "matched_to_preferred";
        case ExplanationCategory::quota_violation: return "quota_violation";
        case ExplanationCategory::displaced_by_promotion: return "displaced_by_promotion";
        case ExplanationCategory::blocking_pair: return "blocking_pair";
    }
    return "?";
}

namespace {

// Assignees the PMA actually ranks; evaluations are undefined over the rest,
// which the IR check reports separately.
std::vector<std::vector<CandidateId>> assignees_by_pma(const StrictMarket& market,
                                                       const Matching& matching) {
    std::vector<std::vector<CandidateId>> out(market.reports.size());
    for (const auto& [c, m] : matching.assignment()) {
        const auto r = market.pma_index.at(m);
        if (market.reports[r].ranks(c)) out[r].push_back(c);
    }
    return out;
}

}  // namespace

IrReport is_individually_rational(const StrictMarket& market, ChoiceKind kind,
                                  const Matching& matching) {
    IrReport rep;
    for (const auto& [c, m] : matching.assignment()) {
        if (market.preference_position(c, m) == StrictMarket::npos)
            rep.witnesses.push_back({"unlisted_assignment", c, m});
        if (!market.reports[market.pma_index.at(m)].ranks(c))
            rep.witnesses.push_back({"pma_rejects_assignee", c, m});
    }

    auto assigned = assignees_by_pma(market, matching);
    for (std::size_t r = 0; r < market.reports.size(); ++r) {
        if (assigned[r].empty()) continue;
        const auto res = choose(market.reports[r], kind, assigned[r]);
        for (const auto& c : assigned[r])
            if (!res.contains(c))
                rep.witnesses.push_back({"pma_rejects_assignee", c, market.reports[r].pma()});
    }
    rep.ok = rep.witnesses.empty();
    return rep;
}

namespace {

// The complete scan for one candidate; results ordered by list position.
std::vector<BlockingPair> blocking_pairs_of(const StrictMarket& market, ChoiceKind kind,
                                            const Matching& matching,
                                            const std::vector<std::vector<CandidateId>>& assigned,
                                            const Candidate& candidate) {
    std::vector<BlockingPair> out;
    const auto current = matching.pma_of(candidate.id);
    for (const auto& m : candidate.preferences) {
        if (current && *current == m) break;  // list positions below are not preferred
        const auto r = market.pma_index.at(m);
        const auto& rep = market.reports[r];
        if (!rep.ranks(candidate.id)) continue;
        auto input = assigned[r];
        input.push_back(candidate.id);
        const auto res = choose(rep, kind, input);
        if (!res.contains(candidate.id)) continue;
        BlockingPair pair;
        pair.candidate = candidate.id;
        pair.pma = m;
        pair.chosen = res.chosen;
        std::sort(pair.chosen.begin(), pair.chosen.end());
        pair.accept_pass = res.entry(candidate.id)->pass;
        pair.classification =
            classify_blocking_pair(market, kind, matching, candidate.id, m);
        out.push_back(std::move(pair));
    }
    return out;
}

std::vector<BlockingPair> find_blocking_pairs_impl(const StrictMarket& market, ChoiceKind kind,
                                                   const Matching& matching, bool parallel) {
    const auto assigned = assignees_by_pma(market, matching);
    const auto& candidates = market.market.candidates;
    std::vector<std::vector<BlockingPair>> per_candidate(candidates.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
    for (std::size_t i = 0; i < candidates.size(); ++i)
        per_candidate[i] = blocking_pairs_of(market, kind, matching, assigned, candidates[i]);
    (void)parallel;

    std::vector<BlockingPair> out;
    for (auto& v : per_candidate)
        for (auto& p : v) out.push_back(std::move(p));
    return out;
}

}  // namespace

std::vector<BlockingPair> find_blocking_pairs(const StrictMarket& market, ChoiceKind kind,
                                              const Matching& matching) {
    return find_blocking_pairs_impl(market, kind, matching, true);
}

std::vector<BlockingPair> find_blocking_pairs_serial(const StrictMarket& market,
                                                     ChoiceKind kind,
                                                     const Matching& matching) {
    return find_blocking_pairs_impl(market, kind, matching, false);
}

BlockingClass classify_blocking_pair(const StrictMarket& market, ChoiceKind kind,
                                     const Matching& matching, const CandidateId& candidate,
                                     const PmaId& pma) {
    const auto r = market.pma_index.at(pma);
    const auto& report = market.market.reports[r];
    const auto& drawn = market.reports[r];

    auto incumbents_v = matching.candidates_of(pma);
    std::erase_if(incumbents_v, [&](const CandidateId& c) { return !drawn.ranks(c); });
    std::set<CandidateId> incumbents(incumbents_v.begin(), incumbents_v.end());

    // Re-break every tie class maximally against the claim: incumbents first,
    // the blocking candidate last, everyone else keeping the drawn order.
    auto adversarial = drawn.order();
    std::stable_sort(adversarial.begin(), adversarial.end(),
                     [&](const CandidateId& a, const CandidateId& b) {
                         const int ra = report.ranking.at(a);
                         const int rb = report.ranking.at(b);
                         if (ra != rb) return ra < rb;
                         auto cls = [&](const CandidateId& x) {
                             if (x == candidate) return 2;
                             return incumbents.count(x) ? 0 : 1;
                         };
                         return cls(a) < cls(b);
                     });
    const auto worst_case = make_strict_report(report, adversarial);

    auto input = incumbents_v;
    input.push_back(candidate);
    const auto res = choose(worst_case, kind, input);
    return res.contains(candidate) ? BlockingClass::real : BlockingClass::tie_break_artifact;
}

Explanation explain_rejection(const StrictMarket& market, ChoiceKind kind,
                              const Matching& matching, const PmaId& pma,
                              const CandidateId& candidate) {
    const auto* rep = market.find_report(pma);
    if (rep == nullptr) throw QueryError("unknown PMA " + pma);
    if (!rep->ranks(candidate))
        throw QueryError("PMA " + pma + " does not rank candidate " + candidate);
    const auto current = matching.pma_of(candidate);
    if (current && *current == pma)
        throw QueryError("candidate " + candidate + " is assigned to PMA " + pma);

    Explanation ex;
    ex.candidate = candidate;
    ex.pma = pma;

    const auto pos = market.preference_position(candidate, pma);
    if (pos == StrictMarket::npos) {
        ex.category = ExplanationCategory::did_not_rank;
        return ex;
    }
    if (current && market.preference_position(candidate, *current) < pos) {
        ex.category = ExplanationCategory::matched_to_preferred;
        ex.detail = *current;
        return ex;
    }

    auto input = matching.candidates_of(pma);
    std::erase_if(input, [&](const CandidateId& c) { return !rep->ranks(c); });
    input.push_back(candidate);
    const auto res = choose(*rep, kind, input);
    const auto* entry = res.entry(candidate);
    if (entry->accepted) {
        ex.category = ExplanationCategory::blocking_pair;
        return ex;
    }
    if (entry->crowded_by_promotion) {
        ex.category = ExplanationCategory::displaced_by_promotion;
        ex.detail = to_string(*entry->crowded_by_promotion);
    } else {
        ex.category = ExplanationCategory::quota_violation;
        ex.detail = entry->rejected_by;
    }
    return ex;
}

std::vector<Explanation> explain_all(const StrictMarket& market, ChoiceKind kind,
                                     const Matching& matching) {
    std::vector<Explanation> out;
    const auto assigned = assignees_by_pma(market, matching);
    for (std::size_t r = 0; r < market.reports.size(); ++r) {
        const auto& rep = market.reports[r];
        if (assigned[r].empty()) continue;
        std::size_t worst_assigned = 0;
        for (const auto& c : assigned[r])
            worst_assigned = std::max(worst_assigned, rep.position_of(c));
        // Every candidate the PMA ranked above some candidate it got.
        for (const auto& c : rep.order()) {
            if (rep.position_of(c) >= worst_assigned) break;
            const auto cur = matching.pma_of(c);
            if (cur && *cur == rep.pma()) continue;
            out.push_back(explain_rejection(market, kind, matching, rep.pma(), c));
        }
    }
    return out;
}

OutcomeStats summarize(const StrictMarket& market, const Matching& matching,
                       const std::vector<BlockingPair>& pairs) {
    OutcomeStats st;
    st.candidates = static_cast<int>(market.market.candidates.size());
    int top = 0;
    for (const auto& c : market.market.candidates) {
        if (!c.preferences.empty()) ++st.candidates_with_preferences;
        const auto m = matching.pma_of(c.id);
        if (!m) continue;
        ++st.matched;
        if (!c.preferences.empty() && c.preferences.front() == *m) ++top;
    }
    st.top_choice_fraction = st.matched > 0 ? static_cast<double>(top) / st.matched : 0.0;

    const auto assigned = assignees_by_pma(market, matching);
    for (std::size_t r = 0; r < market.reports.size(); ++r) {
        const auto& rep = market.reports[r];
        st.slots_total += rep.capacity();
        for (const auto& pop : rep.populations()) {
            PopulationUsage u;
            u.pma = rep.pma();
            u.population = pop.id;
            u.min_target = pop.min_target;
            u.max_quota = pop.max_quota;
            for (const auto& c : assigned[r])
                if (pop.contains(c)) ++u.assigned;
            u.target_met = u.assigned >= pop.min_target;
            st.populations.push_back(std::move(u));
        }
    }
    st.slots_filled_fraction =
        st.slots_total > 0 ? static_cast<double>(st.matched) / st.slots_total : 0.0;

    std::set<PmaId> blocking_pmas;
    for (const auto& p : pairs) {
        ++st.blocking_total;
        if (p.classification == BlockingClass::real)
            ++st.blocking_real;
        else
            ++st.blocking_tie_break_artifact;
        blocking_pmas.insert(p.pma);
    }
    st.blocking_distinct_pmas = static_cast<int>(blocking_pmas.size());
    return st;
}

std::vector<std::pair<PmaId, CandidateId>> find_free_slot_blocking_pairs(
    const StrictMarket& market, ChoiceKind kind, const Matching& matching) {
    std::vector<std::pair<PmaId, CandidateId>> out;
    const auto assigned = assignees_by_pma(market, matching);
    for (std::size_t r = 0; r < market.reports.size(); ++r) {
        const auto& rep = market.reports[r];
        for (const auto& c : rep.order()) {
            if (!market.prefers_over_assignment(c, rep.pma(), matching)) continue;
            auto input = assigned[r];
            input.push_back(c);
            const auto res = choose(rep, kind, input);
            if (res.chosen.size() == input.size()) out.emplace_back(rep.pma(), c);
        }
    }
    return out;
}

}  // namespace popmatch
