#include "popmatch/market.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <unordered_set>

#include "popmatch/rng.hpp"

namespace popmatch {

bool Population::contains(const CandidateId& c) const {
    return std::binary_search(members.begin(), members.end(), c);
}

const Candidate* Market::find_candidate(const CandidateId& id) const {
    for (const auto& c : candidates)
        if (c.id == id) return &c;
    return nullptr;
}

const PreferenceReport* Market::find_report(const PmaId& id) const {
    for (const auto& r : reports)
        if (r.pma == id) return &r;
    return nullptr;
}

std::optional<PmaId> Matching::pma_of(const CandidateId& c) const {
    auto it = assignment_.find(c);
    if (it == assignment_.end()) return std::nullopt;
    return it->second;
}

std::vector<CandidateId> Matching::candidates_of(const PmaId& m) const {
    std::vector<CandidateId> out;
    for (const auto& [c, pma] : assignment_)
        if (pma == m) out.push_back(c);
    return out;
}

std::string to_string(ChoiceKind kind) {
    switch (kind) {
        case ChoiceKind::y2018: return "2018";
        case ChoiceKind::prefer_more: return "prefer-more";
        case ChoiceKind::prefer_more_staged: return "prefer-more-staged";
        case ChoiceKind::y2019: return "2019";
    }
    return "?";
}

ChoiceKind choice_kind_from_string(const std::string& s) {
    if (s == "2018") return ChoiceKind::y2018;
    if (s == "prefer-more") return ChoiceKind::prefer_more;
    if (s == "prefer-more-staged") return ChoiceKind::prefer_more_staged;
    if (s == "2019") return ChoiceKind::y2019;
    throw ValidationError("unknown choice kind: " + s);
}

std::vector<Population> expand_populations(const std::vector<RawPopulation>& raw) {
    std::vector<Population> out;
    for (const auto& rp : raw) {
        if (rp.kind == PopulationKind::binary) {
            Population p;
            p.id = rp.id;
            p.name = rp.name.empty() ? rp.id : rp.name;
            p.members = rp.members;
            std::sort(p.members.begin(), p.members.end());
            p.members.erase(std::unique(p.members.begin(), p.members.end()), p.members.end());
            p.min_target = rp.min_target;
            p.max_quota = rp.max_quota;
            p.is_gender = rp.is_gender;
            out.push_back(std::move(p));
        } else {
            // One binary population per distinct value, in value order.
            std::map<std::string, std::vector<CandidateId>> by_value;
            for (const auto& [cand, value] : rp.values) by_value[value].push_back(cand);
            for (auto& [value, members] : by_value) {
                Population p;
                p.id = rp.id + "=" + value;
                p.name = (rp.name.empty() ? rp.id : rp.name) + "=" + value;
                p.members = std::move(members);
                std::sort(p.members.begin(), p.members.end());
                p.min_target = rp.min_target;
                auto ov = rp.overrides.find(value);
                p.max_quota = ov != rp.overrides.end() ? std::optional<int>(ov->second)
                                                       : rp.max_quota;
                p.is_gender = rp.is_gender;
                out.push_back(std::move(p));
            }
        }
    }
    std::unordered_set<std::string> seen;
    for (const auto& p : out)
        if (!seen.insert(p.id).second)
            throw ValidationError("duplicate population id after expansion: " + p.id);
    return out;
}

std::vector<RawPopulation> auto_populate(const std::vector<Candidate>& candidates,
                                         const std::vector<AutoPopulationRule>& rules) {
    std::vector<RawPopulation> out;
    for (const auto& rule : rules) {
        RawPopulation rp;
        rp.id = rule.id.empty() ? "auto:" + rule.attribute : rule.id;
        rp.name = rp.id;
        rp.kind = PopulationKind::multi_valued;
        rp.min_target = rule.min_target;
        rp.max_quota = rule.max_quota;
        rp.overrides = rule.overrides;
        rp.is_gender = rule.is_gender;
        for (const auto& c : candidates) {
            auto it = c.attributes.find(rule.attribute);
            if (it == c.attributes.end())
                throw ValidationError("candidate " + c.id + " lacks attribute " +
                                      rule.attribute);
            rp.values[c.id] = it->second;
        }
        out.push_back(std::move(rp));
    }
    return out;
}

ValidationReport validate(const Market& market, std::optional<ChoiceKind> kind) {
    ValidationReport rep;
    auto add = [&](std::string code, std::string msg) {
        rep.violations.push_back({std::move(code), std::move(msg)});
    };

    std::unordered_set<std::string> candidate_ids;
    for (const auto& c : market.candidates)
        if (!candidate_ids.insert(c.id).second)
            add("duplicate_id", "duplicate candidate id: " + c.id);

    std::unordered_set<std::string> pma_ids;
    for (const auto& r : market.reports)
        if (!pma_ids.insert(r.pma).second)
            add("duplicate_id", "duplicate PMA report: " + r.pma);

    for (const auto& c : market.candidates) {
        std::unordered_set<std::string> listed;
        for (const auto& m : c.preferences) {
            if (!pma_ids.count(m))
                add("dangling_reference",
                    "candidate " + c.id + " prefers nonexistent PMA " + m);
            if (!listed.insert(m).second)
                add("duplicate_preference",
                    "candidate " + c.id + " lists PMA " + m + " twice");
        }
    }

    const bool rank0_ok = kind.has_value() && *kind == ChoiceKind::y2019;
    for (const auto& r : market.reports) {
        if (r.capacity <= 0)
            add("bad_capacity", "PMA " + r.pma + " has nonpositive capacity");
        for (const auto& [cand, rank] : r.ranking) {
            if (!candidate_ids.count(cand))
                add("dangling_reference",
                    "PMA " + r.pma + " ranks nonexistent candidate " + cand);
            if (rank < 0)
                add("rank_zero", "PMA " + r.pma + " gives negative rank to " + cand);
            if (rank == 0 && !rank0_ok)
                add("rank_zero", "PMA " + r.pma + " uses 0-priority for " + cand +
                                     " outside 2019 semantics");
        }
        for (const auto& rp : r.populations) {
            if (rp.kind == PopulationKind::multi_valued && !rp.members.empty())
                add("dangling_reference", "multi-valued population " + rp.id + " of PMA " +
                                              r.pma + " carries a member list");
        }
        try {
            auto pops = expand_populations(r.populations);
            for (const auto& p : pops) {
                if (p.id == kCapacityPopulationId)
                    add("duplicate_id", "PMA " + r.pma + " population uses reserved id " +
                                            p.id);
                if (p.max_quota && p.min_target > *p.max_quota)
                    add("target_exceeds_quota",
                        "population " + p.id + " of PMA " + r.pma + " has min_target " +
                            std::to_string(p.min_target) + " > max_quota " +
                            std::to_string(*p.max_quota));
                for (const auto& m : p.members) {
                    if (!candidate_ids.count(m))
                        add("dangling_reference", "population " + p.id + " of PMA " + r.pma +
                                                      " contains nonexistent candidate " + m);
                    else if (!r.ranking.count(m))
                        add("member_unranked", "population " + p.id + " of PMA " + r.pma +
                                                   " contains unranked candidate " + m);
                }
            }
        } catch (const ValidationError& e) {
            add("expansion_collision", std::string(e.what()) + " (PMA " + r.pma + ")");
        }
    }
    return rep;
}

std::size_t StrictReport::position_of(const CandidateId& c) const {
    auto it = local_.find(c);
    if (it == local_.end()) throw QueryError("candidate " + c + " not ranked by " + pma_);
    return it->second.position;
}

const StrictReport::MemberInfo* StrictReport::member(const CandidateId& c) const {
    auto it = local_.find(c);
    return it == local_.end() ? nullptr : &it->second;
}

StrictReport make_strict_report(const PreferenceReport& report,
                                const std::vector<CandidateId>& strict_order) {
    StrictReport sr;
    sr.pma_ = report.pma;
    sr.capacity_ = report.capacity;
    sr.populations_ = expand_populations(report.populations);
    sr.order_ = strict_order;

    if (strict_order.size() != report.ranking.size())
        throw ValidationError("strict order size mismatch for PMA " + report.pma);

    for (const auto& p : sr.populations_) {
        StrictReport::PopInfo info;
        info.id = p.id;
        info.min_target = p.min_target;
        info.max_quota = p.max_quota ? static_cast<long long>(*p.max_quota) : LLONG_MAX;
        info.is_gender = p.is_gender;
        sr.pop_infos_.push_back(std::move(info));
    }
    // Capacity as the root population, last so declared quotas are reported
    // first on rejection.
    sr.pop_infos_.push_back(
        {kCapacityPopulationId, 0, static_cast<long long>(report.capacity), false});
    const auto root = static_cast<std::uint16_t>(sr.pop_infos_.size() - 1);

    int prev_rank = INT_MIN;
    for (std::size_t pos = 0; pos < strict_order.size(); ++pos) {
        const auto& c = strict_order[pos];
        auto rit = report.ranking.find(c);
        if (rit == report.ranking.end())
            throw ValidationError("strict order lists unranked candidate " + c + " for PMA " +
                                  report.pma);
        if (rit->second < prev_rank)
            throw ValidationError("strict order does not refine the ranking of PMA " +
                                  report.pma);
        prev_rank = rit->second;
        StrictReport::MemberInfo info;
        info.position = static_cast<std::uint32_t>(pos);
        info.rank = rit->second;
        for (std::size_t p = 0; p < sr.populations_.size(); ++p)
            if (sr.populations_[p].contains(c))
                info.pops.push_back(static_cast<std::uint16_t>(p));
        info.pops.push_back(root);
        if (!sr.local_.emplace(c, std::move(info)).second)
            throw ValidationError("strict order repeats candidate " + c + " for PMA " +
                                  report.pma);
    }
    return sr;
}

const StrictReport* StrictMarket::find_report(const PmaId& id) const {
    auto it = pma_index.find(id);
    return it == pma_index.end() ? nullptr : &reports[it->second];
}

std::size_t StrictMarket::preference_position(const CandidateId& c, const PmaId& m) const {
    auto ci = pref_position.find(c);
    if (ci == pref_position.end()) return npos;
    auto mi = ci->second.find(m);
    return mi == ci->second.end() ? npos : mi->second;
}

bool StrictMarket::prefers_over_assignment(const CandidateId& c, const PmaId& m,
                                           const Matching& matching) const {
    const auto pos = preference_position(c, m);
    if (pos == npos) return false;
    const auto assigned = matching.pma_of(c);
    if (!assigned) return true;
    const auto apos = preference_position(c, *assigned);
    return pos < apos;
}

StrictMarket apply_tie_breaking(const Market& market) {
    StrictMarket sm;
    sm.market = market;

    // One global permutation, shared by every PMA's tie classes.
    std::vector<std::size_t> perm(market.candidates.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(market.tie_break_seed);
    rng.shuffle(perm);

    std::vector<std::size_t> perm_pos(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm_pos[perm[i]] = i;

    for (std::size_t i = 0; i < market.candidates.size(); ++i) {
        sm.tie_break_permutation.push_back(market.candidates[perm[i]].id);
        sm.candidate_index[market.candidates[i].id] = i;
    }
    for (std::size_t i = 0; i < market.candidates.size(); ++i) {
        const auto& c = market.candidates[i];
        auto& positions = sm.pref_position[c.id];
        for (std::size_t k = 0; k < c.preferences.size(); ++k)
            positions[c.preferences[k]] = k;
    }

    for (std::size_t r = 0; r < market.reports.size(); ++r) {
        const auto& report = market.reports[r];
        sm.pma_index[report.pma] = r;

        std::vector<CandidateId> order;
        order.reserve(report.ranking.size());
        for (const auto& [cand, rank] : report.ranking) {
            if (!sm.candidate_index.count(cand))
                throw ValidationError("PMA " + report.pma + " ranks nonexistent candidate " +
                                      cand);
            order.push_back(cand);
        }
        std::sort(order.begin(), order.end(), [&](const CandidateId& a, const CandidateId& b) {
            const int ra = report.ranking.at(a);
            const int rb = report.ranking.at(b);
            if (ra != rb) return ra < rb;
            return perm_pos[sm.candidate_index.at(a)] < perm_pos[sm.candidate_index.at(b)];
        });
        sm.reports.push_back(make_strict_report(report, order));
    }
    return sm;
}

}  // namespace popmatch
