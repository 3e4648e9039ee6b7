#include "popmatch/engine.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace popmatch {

std::string to_string(ParetoMode mode) {
    switch (mode) {
        case ParetoMode::none: return "none";
        case ParetoMode::candidate_only: return "candidate";
        case ParetoMode::alternate: return "alternate";
    }
    return "?";
}

ParetoMode pareto_mode_from_string(const std::string& s) {
    if (s == "none") return ParetoMode::none;
    if (s == "candidate") return ParetoMode::candidate_only;
    if (s == "alternate") return ParetoMode::alternate;
    throw ValidationError("unknown pareto mode: " + s);
}

namespace {

void require_kind_fits(const StrictMarket& market, ChoiceKind kind) {
    if (kind == ChoiceKind::y2019) return;
    for (const auto& report : market.market.reports)
        for (const auto& [cand, rank] : report.ranking)
            if (rank == 0)
                throw SemanticsError("market uses 0-priority ranks; kind " + to_string(kind) +
                                     " does not allow them");
}

}  // namespace

MatchOutcome run_da(const StrictMarket& market, ChoiceKind kind, bool parallel) {
    require_kind_fits(market, kind);
    MatchOutcome out;
    const auto& candidates = market.market.candidates;
    const std::size_t n_pmas = market.reports.size();

    // next[i]: position of candidate i's current target on their list.
    std::vector<std::size_t> next(candidates.size(), 0);

    for (;;) {
        RoundEntry round;
        std::vector<std::vector<CandidateId>> applicants(n_pmas);
        std::vector<std::vector<CandidateId>> unranked(n_pmas);
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const auto& c = candidates[i];
            if (next[i] >= c.preferences.size()) continue;
            const auto& m = c.preferences[next[i]];
            round.applications[c.id] = m;
            const auto r = market.pma_index.at(m);
            // A PMA never chooses a candidate it does not rank.
            if (market.reports[r].ranks(c.id))
                applicants[r].push_back(c.id);
            else
                unranked[r].push_back(c.id);
        }

        std::vector<ChoiceResult> results(n_pmas);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
        for (std::size_t r = 0; r < n_pmas; ++r) {
            if (!applicants[r].empty())
                results[r] = choose(market.reports[r], kind, applicants[r]);
        }

        bool any_rejection = false;
        for (std::size_t r = 0; r < n_pmas; ++r) {
            std::vector<CandidateId> rejected = unranked[r];
            for (const auto& c : applicants[r])
                if (!results[r].contains(c)) rejected.push_back(c);
            if (rejected.empty()) continue;
            any_rejection = true;
            for (const auto& c : rejected) ++next[market.candidate_index.at(c)];
            round.rejections[market.reports[r].pma()] = std::move(rejected);
        }

        const bool done = !any_rejection;
        out.rounds.push_back(std::move(round));
        if (done) break;
    }

    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (next[i] < candidates[i].preferences.size())
            out.matching.assign(candidates[i].id, candidates[i].preferences[next[i]]);
    return out;
}

namespace {

struct Assignments {
    std::vector<std::vector<CandidateId>> per_pma;  // kept in strict order

    static Assignments build(const StrictMarket& market, const Matching& matching) {
        Assignments a;
        a.per_pma.resize(market.reports.size());
        for (const auto& [c, m] : matching.assignment())
            a.per_pma[market.pma_index.at(m)].push_back(c);
        for (std::size_t r = 0; r < a.per_pma.size(); ++r) {
            const auto& rep = market.reports[r];
            std::sort(a.per_pma[r].begin(), a.per_pma[r].end(),
                      [&](const CandidateId& x, const CandidateId& y) {
                          return rep.position_of(x) < rep.position_of(y);
                      });
        }
        return a;
    }

    void move(const StrictMarket& market, const Matching& before, const CandidateId& c,
              std::size_t to_pma) {
        if (auto prev = before.pma_of(c)) {
            auto& v = per_pma[market.pma_index.at(*prev)];
            v.erase(std::remove(v.begin(), v.end(), c), v.end());
        }
        const auto& rep = market.reports[to_pma];
        auto& v = per_pma[to_pma];
        v.insert(std::upper_bound(v.begin(), v.end(), c,
                                  [&](const CandidateId& a, const CandidateId& b) {
                                      return rep.position_of(a) < rep.position_of(b);
                                  }),
                 c);
    }
};

}  // namespace

StageResult candidate_pareto_stage(const StrictMarket& market, ChoiceKind kind,
                                   const Matching& matching) {
    StageResult out;
    out.matching = matching;
    auto assigned = Assignments::build(market, matching);

    for (;;) {
        bool resolved = false;
        for (std::size_t r = 0; r < market.reports.size() && !resolved; ++r) {
            const auto& rep = market.reports[r];
            const auto& held = assigned.per_pma[r];
            // A whole-set acceptance needs capacity headroom (except under
            // 2019, where 0-priority members may already exceed it).
            if (kind != ChoiceKind::y2019 &&
                held.size() >= static_cast<std::size_t>(rep.capacity()))
                continue;
            for (const auto& c : rep.order()) {
                const auto current = out.matching.pma_of(c);
                if (current && *current == rep.pma()) continue;
                if (!market.prefers_over_assignment(c, rep.pma(), out.matching)) continue;
                auto input = held;
                input.push_back(c);
                const auto res = choose(rep, kind, input);
                if (res.chosen.size() != input.size()) continue;
                // Blocking pair resolvable without rejecting anyone.
                assigned.move(market, out.matching, c, r);
                out.matching.assign(c, rep.pma());
                out.resolutions.push_back(
                    {StageResolution::Stage::candidate, rep.pma(), c, std::nullopt});
                resolved = true;
                break;
            }
        }
        if (!resolved) break;
    }
    return out;
}

StageResult pma_pareto_stage(const StrictMarket& market, ChoiceKind kind,
                             const Matching& matching) {
    StageResult out;
    out.matching = matching;
    auto assigned = Assignments::build(market, matching);

    // No acceptable option strictly after `m` on the candidate's own list.
    auto no_options_below = [&](const CandidateId& d, const PmaId& m) {
        const auto pos = market.preference_position(d, m);
        if (pos == StrictMarket::npos) return false;
        const auto& prefs = market.market.candidates[market.candidate_index.at(d)].preferences;
        for (std::size_t k = pos + 1; k < prefs.size(); ++k) {
            const auto* lower = market.find_report(prefs[k]);
            if (lower != nullptr && lower->ranks(d)) return false;
        }
        return true;
    };

    const int cap = static_cast<int>(market.candidate_count()) * 10 + 100;
    for (int iter = 0;; ++iter) {
        if (iter >= cap) {
            out.cap_hit = true;
            break;
        }
        bool resolved = false;
        for (std::size_t r = 0; r < market.reports.size() && !resolved; ++r) {
            const auto& rep = market.reports[r];
            const auto& held = assigned.per_pma[r];
            for (const auto& c : rep.order()) {
                if (out.matching.pma_of(c)) continue;  // newcomer must be unassigned
                if (market.preference_position(c, rep.pma()) == StrictMarket::npos) continue;
                auto input = held;
                input.push_back(c);
                const auto res = choose(rep, kind, input);
                if (!res.contains(c)) continue;
                if (res.chosen.size() != held.size()) continue;  // one-for-one swap only
                CandidateId displaced;
                int displaced_count = 0;
                for (const auto& h : held)
                    if (!res.contains(h)) {
                        displaced = h;
                        ++displaced_count;
                    }
                if (displaced_count != 1) continue;
                if (!no_options_below(displaced, rep.pma())) continue;
                out.matching.unassign(displaced);
                out.matching.assign(c, rep.pma());
                auto& v = assigned.per_pma[r];
                v.erase(std::remove(v.begin(), v.end(), displaced), v.end());
                assigned.move(market, out.matching, c, r);
                out.resolutions.push_back(
                    {StageResolution::Stage::pma, rep.pma(), c, displaced});
                resolved = true;
                break;
            }
        }
        if (!resolved) break;
    }
    return out;
}

MatchOutcome run_pipeline(const StrictMarket& market, const PipelineConfig& config) {
    if (config.pareto == ParetoMode::alternate && config.alternation_cap <= 0)
        throw ValidationError("alternate pipeline requires a positive alternation cap");

    MatchOutcome out = run_da(market, config.kind);
    if (config.pareto == ParetoMode::none) return out;

    if (config.pareto == ParetoMode::candidate_only) {
        auto stage = candidate_pareto_stage(market, config.kind, out.matching);
        out.matching = std::move(stage.matching);
        out.stage_log.insert(out.stage_log.end(), stage.resolutions.begin(),
                             stage.resolutions.end());
        return out;
    }

    for (int iter = 1;; ++iter) {
        auto c_stage = candidate_pareto_stage(market, config.kind, out.matching);
        out.matching = std::move(c_stage.matching);
        out.stage_log.insert(out.stage_log.end(), c_stage.resolutions.begin(),
                             c_stage.resolutions.end());
        auto p_stage = pma_pareto_stage(market, config.kind, out.matching);
        out.matching = std::move(p_stage.matching);
        out.stage_log.insert(out.stage_log.end(), p_stage.resolutions.begin(),
                             p_stage.resolutions.end());
        out.stage_cap_hit = out.stage_cap_hit || p_stage.cap_hit;
        const bool changed = !c_stage.resolutions.empty() || !p_stage.resolutions.empty();
        if (!changed) break;
        if (iter >= config.alternation_cap) {
            out.alternation_cap_hit = true;
            break;
        }
    }
    return out;
}

Matching run_boston(const StrictMarket& market, ChoiceKind kind) {
    require_kind_fits(market, kind);
    const auto& candidates = market.market.candidates;
    std::vector<std::vector<CandidateId>> committed(market.reports.size());
    std::vector<char> matched(candidates.size(), 0);

    for (std::size_t k = 0;; ++k) {
        std::vector<std::vector<CandidateId>> applicants(market.reports.size());
        bool any = false;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (matched[i]) continue;
            const auto& prefs = candidates[i].preferences;
            if (k >= prefs.size()) continue;
            any = true;
            const auto r = market.pma_index.at(prefs[k]);
            if (market.reports[r].ranks(candidates[i].id))
                applicants[r].push_back(candidates[i].id);
        }
        if (!any) break;
        for (std::size_t r = 0; r < market.reports.size(); ++r) {
            if (applicants[r].empty()) continue;
            const auto res =
                choose_with_committed(market.reports[r], kind, committed[r], applicants[r]);
            for (const auto& c : applicants[r])
                if (res.contains(c)) {
                    committed[r].push_back(c);
                    matched[market.candidate_index.at(c)] = 1;
                }
        }
    }

    Matching out;
    for (std::size_t r = 0; r < market.reports.size(); ++r)
        for (const auto& c : committed[r]) out.assign(c, market.reports[r].pma());
    return out;
}

}  // namespace popmatch
