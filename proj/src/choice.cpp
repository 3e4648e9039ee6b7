#include "popmatch/choice.hpp"

#include <algorithm>
#include <unordered_set>

namespace popmatch {

std::string to_string(AcceptPass pass) {
    switch (pass) {
        case AcceptPass::zero_priority: return "zero_priority";
        case AcceptPass::min_target: return "min_target";
        case AcceptPass::gender_min_target: return "gender_min_target";
        case AcceptPass::regular: return "regular";
        case AcceptPass::committed: return "committed";
    }
    return "?";
}

bool ChoiceResult::contains(const CandidateId& c) const {
    return std::find(chosen.begin(), chosen.end(), c) != chosen.end();
}

const ChoiceTraceEntry* ChoiceResult::entry(const CandidateId& c) const {
    for (const auto& e : trace)
        if (e.candidate == c) return &e;
    return nullptr;
}

namespace {

constexpr int kUndecided = 0;
constexpr int kChosen = 1;
constexpr int kRejected = 2;

// One choice evaluation over a PMA's strict report. Members are addressed by
// their index into `members` (sorted by strict position, committed and
// applicants together).
struct Eval {
    const StrictReport& rep;
    std::vector<const StrictReport::MemberInfo*> info;
    std::vector<CandidateId> ids;
    std::vector<char> is_applicant;
    std::vector<long long> counts;  // per pop (root included)
    std::vector<int> state;
    std::vector<AcceptPass> pass;
    std::vector<int> seq;
    std::vector<int> rejected_by;  // pop index, -1 if none
    std::vector<std::optional<AcceptPass>> crowded;
    int next_seq = 0;

    explicit Eval(const StrictReport& r) : rep(r), counts(r.pop_infos().size(), 0) {}

    std::size_t size() const { return info.size(); }

    void add(const CandidateId& c, bool applicant) {
        const auto* m = rep.member(c);
        if (m == nullptr)
            throw QueryError("candidate " + c + " not ranked by PMA " + rep.pma());
        info.push_back(m);
        ids.push_back(c);
        is_applicant.push_back(applicant ? 1 : 0);
    }

    void finish_setup() {
        std::vector<std::size_t> idx(info.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return info[a]->position < info[b]->position;
        });
        auto reorder = [&](auto& v) {
            auto copy = v;
            for (std::size_t i = 0; i < idx.size(); ++i) v[i] = copy[idx[i]];
        };
        reorder(info);
        reorder(ids);
        reorder(is_applicant);
        state.assign(info.size(), kUndecided);
        pass.assign(info.size(), AcceptPass::regular);
        seq.assign(info.size(), -1);
        rejected_by.assign(info.size(), -1);
        crowded.assign(info.size(), std::nullopt);
    }

    bool rank0(std::size_t i) const { return info[i]->rank == 0; }

    // First violated quota, declared populations before the capacity root.
    int first_violated(std::size_t i) const {
        for (auto p : info[i]->pops)
            if (counts[p] + 1 > rep.pop_infos()[p].max_quota) return p;
        return -1;
    }

    bool quota_ok(std::size_t i) const { return first_violated(i) == -1; }

    int unmet_count(std::size_t i) const {
        int n = 0;
        for (auto p : info[i]->pops) {
            const auto& pi = rep.pop_infos()[p];
            if (pi.min_target > 0 && counts[p] < pi.min_target) ++n;
        }
        return n;
    }

    bool helps_unmet(std::size_t i) const {
        for (auto p : info[i]->pops) {
            const auto& pi = rep.pop_infos()[p];
            if (pi.min_target > 0 && counts[p] < pi.min_target) return true;
        }
        return false;
    }

    bool helps_unmet_gendered(std::size_t i, bool gender) const {
        for (auto p : info[i]->pops) {
            const auto& pi = rep.pop_infos()[p];
            if (pi.is_gender == gender && pi.min_target > 0 && counts[p] < pi.min_target)
                return true;
        }
        return false;
    }

    void accept(std::size_t i, AcceptPass p) {
        state[i] = kChosen;
        pass[i] = p;
        seq[i] = next_seq++;
        for (auto pop : info[i]->pops) ++counts[pop];
    }

    void reject(std::size_t i) {
        state[i] = kRejected;
        const int p = first_violated(i);
        rejected_by[i] = p;
        if (p >= 0 && static_cast<std::size_t>(p) == rep.root_pop()) {
            // Capacity alone binds: note the worst-ranked promoted candidate
            // holding a slot below this one, if any.
            for (std::size_t j = size(); j-- > i + 1;) {
                if (state[j] == kChosen && pass[j] != AcceptPass::regular &&
                    pass[j] != AcceptPass::committed) {
                    crowded[i] = pass[j];
                    break;
                }
            }
        }
    }

    ChoiceResult result() const {
        ChoiceResult out;
        std::vector<std::pair<int, CandidateId>> by_seq;
        for (std::size_t i = 0; i < size(); ++i) {
            ChoiceTraceEntry e;
            e.candidate = ids[i];
            e.accepted = state[i] == kChosen;
            if (e.accepted) {
                e.pass = pass[i];
                e.accept_seq = seq[i];
                by_seq.emplace_back(seq[i], ids[i]);
            } else if (rejected_by[i] >= 0) {
                e.rejected_by = rep.pop_infos()[rejected_by[i]].id;
                e.crowded_by_promotion = crowded[i];
            }
            out.trace.push_back(std::move(e));
        }
        std::sort(by_seq.begin(), by_seq.end());
        for (auto& [s, c] : by_seq) out.chosen.push_back(std::move(c));
        return out;
    }
};

void reject_rank0_outside_2019(const Eval& ev) {
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev.rank0(i))
            throw SemanticsError("0-priority candidate " + ev.ids[i] +
                                 " under non-2019 semantics at PMA " + ev.rep.pma());
}

void run_2018(Eval& ev) {
    reject_rank0_outside_2019(ev);
    // First pass: candidates helping some unmet minimum target.
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev.state[i] == kUndecided && ev.helps_unmet(i))
            if (ev.quota_ok(i)) ev.accept(i, AcceptPass::min_target);
    // Second pass: everyone else.
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev.state[i] == kUndecided) {
            if (ev.quota_ok(i))
                ev.accept(i, AcceptPass::regular);
            else
                ev.reject(i);
        }
}

void run_prefer_more(Eval& ev) {
    reject_rank0_outside_2019(ev);
    // Recomputed naively every iteration, matching the reference formulation.
    for (;;) {
        int best_n = -1;
        std::size_t best = 0;
        for (std::size_t i = 0; i < ev.size(); ++i) {
            if (ev.state[i] != kUndecided) continue;
            const int n = ev.unmet_count(i);
            if (n > best_n) {  // ties fall to the earlier (better-ranked) index
                best_n = n;
                best = i;
            }
        }
        if (best_n < 0) break;
        if (ev.quota_ok(best))
            ev.accept(best, best_n > 0 ? AcceptPass::min_target : AcceptPass::regular);
        else
            ev.reject(best);
    }
}

void run_prefer_more_staged(Eval& ev) {
    reject_rank0_outside_2019(ev);
    int levels = 0;
    for (const auto& pi : ev.rep.pop_infos())
        if (pi.min_target > 0) ++levels;
    // A candidate's unmet count never increases, so scanning levels downward
    // examines everyone at the level matching their current count.
    for (int level = levels; level >= 0; --level) {
        for (std::size_t i = 0; i < ev.size(); ++i) {
            if (ev.state[i] != kUndecided) continue;
            if (ev.unmet_count(i) != level) continue;
            if (ev.quota_ok(i))
                ev.accept(i, level > 0 ? AcceptPass::min_target : AcceptPass::regular);
            else
                ev.reject(i);
        }
    }
}

void run_2019(Eval& ev) {
    // 0-priority candidates enter unconditionally; quotas may end up exceeded.
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev.state[i] == kUndecided && ev.rank0(i)) ev.accept(i, AcceptPass::zero_priority);
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev.state[i] == kUndecided && ev.helps_unmet_gendered(i, false))
            if (ev.quota_ok(i)) ev.accept(i, AcceptPass::min_target);
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev.state[i] == kUndecided && ev.helps_unmet_gendered(i, true))
            if (ev.quota_ok(i)) ev.accept(i, AcceptPass::gender_min_target);
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (ev.state[i] == kUndecided) {
            if (ev.quota_ok(i))
                ev.accept(i, AcceptPass::regular);
            else
                ev.reject(i);
        }
}

void run_kind(Eval& ev, ChoiceKind kind) {
    switch (kind) {
        case ChoiceKind::y2018: run_2018(ev); break;
        case ChoiceKind::prefer_more: run_prefer_more(ev); break;
        case ChoiceKind::prefer_more_staged: run_prefer_more_staged(ev); break;
        case ChoiceKind::y2019: run_2019(ev); break;
    }
}

Eval make_eval(const StrictReport& report, const std::vector<CandidateId>& committed,
               const std::vector<CandidateId>& applicants) {
    Eval ev(report);
    std::unordered_set<std::string> seen;
    for (const auto& c : committed) {
        if (!seen.insert(c).second) continue;
        ev.add(c, false);
    }
    for (const auto& c : applicants) {
        if (seen.count(c))
            throw QueryError("candidate " + c + " is both committed and applicant");
        if (!seen.insert(c).second) continue;
        ev.add(c, true);
    }
    ev.finish_setup();
    return ev;
}

}  // namespace

ChoiceResult choose(const StrictReport& report, ChoiceKind kind,
                    const std::vector<CandidateId>& input) {
    Eval ev = make_eval(report, {}, input);
    run_kind(ev, kind);
    return ev.result();
}

ChoiceResult choose_2018(const StrictReport& report, const std::vector<CandidateId>& input) {
    return choose(report, ChoiceKind::y2018, input);
}

ChoiceResult choose_prefer_more(const StrictReport& report,
                                const std::vector<CandidateId>& input) {
    return choose(report, ChoiceKind::prefer_more, input);
}

ChoiceResult choose_prefer_more_staged(const StrictReport& report,
                                       const std::vector<CandidateId>& input) {
    return choose(report, ChoiceKind::prefer_more_staged, input);
}

ChoiceResult choose_2019(const StrictReport& report, const std::vector<CandidateId>& input) {
    return choose(report, ChoiceKind::y2019, input);
}

ChoiceResult choose_with_committed(const StrictReport& report, ChoiceKind kind,
                                   const std::vector<CandidateId>& committed,
                                   const std::vector<CandidateId>& applicants) {
    Eval ev = make_eval(report, committed, applicants);
    // Pre-load: committed members are chosen outright and count everywhere.
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (!ev.is_applicant[i]) ev.accept(i, AcceptPass::committed);

    std::vector<std::string> preload;
    for (std::size_t p = 0; p < ev.counts.size(); ++p)
        if (ev.counts[p] > report.pop_infos()[p].max_quota)
            preload.push_back(report.pop_infos()[p].id);

    // The kind's passes run over applicants only; committed are already decided.
    run_kind(ev, kind);
    auto out = ev.result();
    out.preload_violations = std::move(preload);
    return out;
}

}  // namespace popmatch
