#include "popmatch/oracle.hpp"

#include <algorithm>
#include <set>

#include "popmatch/choice.hpp"

namespace popmatch::oracle {

namespace {

RawPopulation binary_pop(std::string id, std::vector<CandidateId> members, int min_target,
                         std::optional<int> max_quota) {
    RawPopulation p;
    p.id = std::move(id);
    p.name = p.id;
    p.kind = PopulationKind::binary;
    p.members = std::move(members);
    p.min_target = min_target;
    p.max_quota = max_quota;
    return p;
}

}  // namespace

Market fixture(FixtureId id) {
    Market mkt;
    switch (id) {
        case FixtureId::thm3_no_stable: {
            mkt.candidates = {{"c", {"m2", "m1"}, {}},
                              {"d", {"m1", "m2"}, {}},
                              {"e", {"m1", "m2"}, {}}};
            PreferenceReport m1;
            m1.pma = "m1";
            m1.capacity = 3;  // unconstrained beyond its population quotas
            m1.ranking = {{"c", 1}, {"d", 2}, {"e", 3}};
            m1.populations = {binary_pop("cde", {"c", "d", "e"}, 1, std::nullopt),
                              binary_pop("de", {"d", "e"}, 0, 1),
                              binary_pop("e", {"e"}, 1, std::nullopt)};
            PreferenceReport m2;
            m2.pma = "m2";
            m2.capacity = 1;
            m2.ranking = {{"e", 1}, {"c", 2}, {"d", 3}};
            mkt.reports = {m1, m2};
            break;
        }
        case FixtureId::thm3_strategyproofness: {
            mkt.candidates = {{"c", {"m3", "m1"}, {}},
                              {"d", {"m1"}, {}},
                              {"e", {"m1", "m2"}, {}},
                              {"f", {"m3"}, {}},
                              {"g", {"m2"}, {}}};
            PreferenceReport m1;
            m1.pma = "m1";
            m1.capacity = 3;
            m1.ranking = {{"c", 1}, {"d", 2}, {"e", 3}};
            m1.populations = {binary_pop("cde", {"c", "d", "e"}, 1, std::nullopt),
                              binary_pop("de", {"d", "e"}, 0, 1),
                              binary_pop("e", {"e"}, 1, std::nullopt)};
            PreferenceReport m2;  // ranks g first, then the rest
            m2.pma = "m2";
            m2.capacity = 1;
            m2.ranking = {{"g", 1}, {"c", 2}, {"d", 3}, {"e", 4}, {"f", 5}};
            PreferenceReport m3;  // ranks f first, then the rest
            m3.pma = "m3";
            m3.capacity = 1;
            m3.ranking = {{"f", 1}, {"c", 2}, {"d", 3}, {"e", 4}, {"g", 5}};
            mkt.reports = {m1, m2, m3};
            break;
        }
        case FixtureId::footnote26_free_slot: {
            mkt.candidates = {{"c", {"m1"}, {}},
                              {"d", {"m1"}, {}},
                              {"e", {"m2", "m1"}, {}},
                              {"x", {"m2"}, {}}};
            PreferenceReport m1;
            m1.pma = "m1";
            m1.capacity = 2;
            m1.ranking = {{"e", 1}, {"d", 2}, {"c", 3}};
            m1.populations = {binary_pop("cd", {"c", "d"}, 0, 1),
                              binary_pop("de", {"d", "e"}, 0, 1)};
            PreferenceReport m2;
            m2.pma = "m2";
            m2.capacity = 1;
            m2.ranking = {{"x", 1}, {"e", 2}};
            mkt.reports = {m1, m2};
            break;
        }
    }
    return mkt;
}

std::vector<std::pair<CandidateId, PmaId>> enumerate_blocking_pairs(
    const StrictMarket& market, ChoiceKind kind, const Matching& matching) {
    std::vector<std::pair<CandidateId, PmaId>> out;
    for (const auto& cand : market.market.candidates) {
        for (const auto& m : cand.preferences) {
            if (auto cur = matching.pma_of(cand.id)) {
                const auto mpos = market.preference_position(cand.id, m);
                const auto apos = market.preference_position(cand.id, *cur);
                if (mpos >= apos) continue;
            }
            const auto* rep = market.find_report(m);
            if (rep == nullptr || !rep->ranks(cand.id)) continue;
            auto input = matching.candidates_of(m);
            input.push_back(cand.id);
            if (choose(*rep, kind, input).contains(cand.id)) out.emplace_back(cand.id, m);
        }
    }
    return out;
}

bool is_stable(const StrictMarket& market, ChoiceKind kind, const Matching& matching) {
    for (const auto& [c, m] : matching.assignment())
        if (market.preference_position(c, m) == StrictMarket::npos) return false;
    for (const auto& rep : market.reports) {
        auto held = matching.candidates_of(rep.pma());
        if (held.empty()) continue;
        const auto res = choose(rep, kind, held);
        if (res.chosen.size() != held.size()) return false;
    }
    return enumerate_blocking_pairs(market, kind, matching).empty();
}

std::vector<Matching> brute_force_stable_matchings(const StrictMarket& market,
                                                   ChoiceKind kind,
                                                   BruteForceBounds bounds) {
    const auto& candidates = market.market.candidates;
    if (candidates.size() > static_cast<std::size_t>(bounds.max_candidates))
        throw BoundExceeded("brute force refused: " + std::to_string(candidates.size()) +
                            " candidates exceed bound " +
                            std::to_string(bounds.max_candidates));
    if (market.reports.size() > static_cast<std::size_t>(bounds.max_pmas))
        throw BoundExceeded("brute force refused: " + std::to_string(market.reports.size()) +
                            " PMAs exceed bound " + std::to_string(bounds.max_pmas));

    std::vector<Matching> stable;
    std::vector<std::size_t> pick(candidates.size(), 0);  // prefs index, len = unmatched
    for (;;) {
        Matching m;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (pick[i] < candidates[i].preferences.size())
                m.assign(candidates[i].id, candidates[i].preferences[pick[i]]);
        if (is_stable(market, kind, m)) stable.push_back(std::move(m));

        std::size_t i = 0;
        for (; i < candidates.size(); ++i) {
            if (pick[i] < candidates[i].preferences.size()) {
                ++pick[i];
                break;
            }
            pick[i] = 0;
        }
        if (i == candidates.size()) break;
    }
    return stable;
}

const PropertyViolation* PropertyReport::first(const std::string& property) const {
    for (const auto& v : violations)
        if (v.property == property) return &v;
    return nullptr;
}

PropertyReport check_choice_properties(const StrictReport& report, ChoiceKind kind,
                                       int max_universe) {
    const auto& universe = report.order();
    if (universe.size() > static_cast<std::size_t>(max_universe))
        throw BoundExceeded("property check refused: universe " +
                            std::to_string(universe.size()) + " exceeds bound " +
                            std::to_string(max_universe));

    const std::size_t n = universe.size();
    std::vector<std::set<CandidateId>> chosen(1u << n);
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<CandidateId> subset;
        for (std::size_t b = 0; b < n; ++b)
            if (mask & (1u << b)) subset.push_back(universe[b]);
        const auto res = choose(report, kind, subset);
        chosen[mask] = std::set<CandidateId>(res.chosen.begin(), res.chosen.end());
    }

    PropertyReport out;
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        ++out.subsets_checked;
        for (std::size_t b = 0; b < n; ++b) {
            if (!(mask & (1u << b))) continue;
            const auto& c = universe[b];
            const auto& full = chosen[mask];
            const auto& reduced = chosen[mask & ~(1u << b)];

            auto violation = [&](const char* property) {
                PropertyViolation v;
                v.property = property;
                for (std::size_t k = 0; k < n; ++k)
                    if (mask & (1u << k)) v.subset.push_back(universe[k]);
                v.removed = c;
                v.chosen_full.assign(full.begin(), full.end());
                v.chosen_reduced.assign(reduced.begin(), reduced.end());
                out.violations.push_back(std::move(v));
            };

            // Substitutability: full \ {c} must survive the removal.
            bool sub_ok = true;
            for (const auto& x : full)
                if (x != c && !reduced.count(x)) sub_ok = false;
            if (!sub_ok) violation("substitutability");

            if (!full.count(c)) {
                if (reduced != full) violation("irc");
            } else {
                auto expected = full;
                expected.erase(c);
                bool one_removal = reduced == expected;
                if (!one_removal && reduced.size() == expected.size() + 1) {
                    one_removal = std::includes(reduced.begin(), reduced.end(),
                                                expected.begin(), expected.end());
                }
                if (!one_removal) violation("one_removal");
            }

            if (reduced.size() > full.size()) violation("lad");
        }
    }
    return out;
}

namespace {

// All ordered arrangements of every subset of `pool`.
std::vector<std::vector<PmaId>> all_ordered_sublists(const std::vector<PmaId>& pool) {
    std::vector<std::vector<PmaId>> out{{}};
    std::vector<std::vector<PmaId>> frontier{{}};
    while (!frontier.empty()) {
        std::vector<std::vector<PmaId>> next;
        for (const auto& prefix : frontier) {
            for (const auto& m : pool) {
                if (std::find(prefix.begin(), prefix.end(), m) != prefix.end()) continue;
                auto ext = prefix;
                ext.push_back(m);
                out.push_back(ext);
                next.push_back(std::move(ext));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

std::optional<PmaId> outcome_for(const Market& market, const PipelineConfig& config,
                                 const CandidateId& candidate) {
    const auto sm = apply_tie_breaking(market);
    return run_pipeline(sm, config).matching.pma_of(candidate);
}

Market with_preferences(const Market& market, const CandidateId& candidate,
                        const std::vector<PmaId>& prefs) {
    Market copy = market;
    for (auto& c : copy.candidates)
        if (c.id == candidate) c.preferences = prefs;
    return copy;
}

// Position on the TRUE list; one past the end means unmatched.
std::size_t true_rank(const std::vector<PmaId>& true_prefs,
                      const std::optional<PmaId>& outcome) {
    if (!outcome) return true_prefs.size();
    const auto it = std::find(true_prefs.begin(), true_prefs.end(), *outcome);
    return it == true_prefs.end() ? true_prefs.size()
                                  : static_cast<std::size_t>(it - true_prefs.begin());
}

}  // namespace

ManipulationReport check_strategyproofness_exhaustive(const Market& market,
                                                      const PipelineConfig& config,
                                                      const CandidateId& candidate,
                                                      int max_acceptable) {
    const auto* cand = market.find_candidate(candidate);
    if (cand == nullptr) throw QueryError("unknown candidate " + candidate);
    if (cand->preferences.size() > static_cast<std::size_t>(max_acceptable))
        throw BoundExceeded("misreport enumeration refused: acceptable set of " + candidate +
                            " has " + std::to_string(cand->preferences.size()) +
                            " elements, bound " + std::to_string(max_acceptable));

    ManipulationReport rep;
    rep.candidate = candidate;
    const auto truthful = outcome_for(market, config, candidate);
    const auto truthful_rank = true_rank(cand->preferences, truthful);
    const auto true_prefs = cand->preferences;

    for (const auto& list : all_ordered_sublists(true_prefs)) {
        ++rep.lists_tried;
        if (list == true_prefs) continue;
        const auto outcome =
            outcome_for(with_preferences(market, candidate, list), config, candidate);
        if (true_rank(true_prefs, outcome) < truthful_rank)
            rep.profitable.push_back({list, truthful, outcome});
    }
    return rep;
}

TruncationReport check_truncation_safety(const Market& market, const PipelineConfig& config) {
    TruncationReport rep;
    const auto sm = apply_tie_breaking(market);
    const auto full_outcome = run_pipeline(sm, config).matching;
    ++rep.runs;

    for (const auto& cand : market.candidates) {
        for (std::size_t len = 1; len + 1 <= cand.preferences.size(); ++len) {
            std::vector<PmaId> prefix(cand.preferences.begin(),
                                      cand.preferences.begin() + len);
            const auto truncated =
                outcome_for(with_preferences(market, cand.id, prefix), config, cand.id);
            ++rep.runs;
            if (!truncated) continue;
            const auto full = full_outcome.pma_of(cand.id);
            if (!full || *full != *truncated)
                rep.violations.push_back(
                    {cand.id, static_cast<int>(len), *truncated, full});
        }
    }
    return rep;
}

SureThingReport check_sure_thing(const Market& market, const PipelineConfig& config,
                                 const CandidateId& candidate, const PmaId& pma,
                                 int max_ranked_for_guarantee, int max_acceptable) {
    SureThingReport rep;
    const auto* cand = market.find_candidate(candidate);
    if (cand == nullptr) throw QueryError("unknown candidate " + candidate);
    const auto sm = apply_tie_breaking(market);
    const auto* strict = sm.find_report(pma);
    if (strict == nullptr) throw QueryError("unknown PMA " + pma);

    if (!strict->ranks(candidate)) {
        rep.reason = "PMA does not rank the candidate";
        return rep;
    }
    const auto& ranked = strict->order();
    if (ranked.size() > static_cast<std::size_t>(max_ranked_for_guarantee))
        throw BoundExceeded("sure-thing guarantee check refused: " +
                            std::to_string(ranked.size()) + " ranked candidates exceed bound " +
                            std::to_string(max_ranked_for_guarantee));

    // Guarantee precondition: chosen from every subset containing them.
    std::vector<CandidateId> others;
    for (const auto& c : ranked)
        if (c != candidate) others.push_back(c);
    for (std::size_t mask = 0; mask < (1u << others.size()); ++mask) {
        std::vector<CandidateId> subset{candidate};
        for (std::size_t b = 0; b < others.size(); ++b)
            if (mask & (1u << b)) subset.push_back(others[b]);
        if (!choose(*strict, config.kind, subset).contains(candidate)) {
            rep.reason = "choice can reject the candidate from some subset";
            return rep;
        }
    }
    rep.applicable = true;

    if (cand->preferences.size() > static_cast<std::size_t>(max_acceptable))
        throw BoundExceeded("sure-thing list enumeration refused: acceptable set has " +
                            std::to_string(cand->preferences.size()) + " elements, bound " +
                            std::to_string(max_acceptable));

    for (const auto& list : all_ordered_sublists(cand->preferences)) {
        const auto it = std::find(list.begin(), list.end(), pma);
        if (it == list.end()) continue;
        ++rep.lists_tried;
        const auto outcome =
            outcome_for(with_preferences(market, candidate, list), config, candidate);
        // Must land at the PMA or one placed higher on the submitted list.
        bool ok = false;
        if (outcome) {
            const auto opos = std::find(list.begin(), list.end(), *outcome);
            ok = opos != list.end() && opos <= it;
        }
        if (!ok) rep.violations.push_back({list, outcome});
    }
    return rep;
}

}  // namespace popmatch::oracle
