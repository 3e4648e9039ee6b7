#include "popmatch/synth.hpp"

#include <algorithm>
#include <numeric>

#include "popmatch/rng.hpp"
#include "popmatch/structure.hpp"

namespace popmatch::synth {

std::string to_string(GenMode mode) {
    switch (mode) {
        case GenMode::laminar_disjoint_targets: return "laminar-disjoint";
        case GenMode::laminar_chain_targets: return "laminar-chain";
        case GenMode::arbitrary_intersecting: return "arbitrary";
    }
    return "?";
}

GenMode gen_mode_from_string(const std::string& s) {
    if (s == "laminar-disjoint") return GenMode::laminar_disjoint_targets;
    if (s == "laminar-chain") return GenMode::laminar_chain_targets;
    if (s == "arbitrary") return GenMode::arbitrary_intersecting;
    throw ValidationError("unknown generation mode: " + s);
}

namespace {

void check_config(const GenConfig& cfg) {
    if (cfg.candidates < 0 || cfg.pmas < 0) throw GenerationError("negative counts");
    if (cfg.slots_min < 1 || cfg.slots_max < cfg.slots_min)
        throw GenerationError("empty slots range");
    if (cfg.list_min < 0 || cfg.list_max < cfg.list_min)
        throw GenerationError("empty list-length range");
    if (cfg.pops_min < 0 || cfg.pops_max < cfg.pops_min)
        throw GenerationError("empty populations range");
    if (cfg.alpha < 0.0 || cfg.alpha > 1.0) throw GenerationError("alpha outside [0,1]");
    if (cfg.mode != GenMode::arbitrary_intersecting && cfg.pops_min > cfg.candidates)
        throw GenerationError("more populations than candidates in laminar mode");
    if (cfg.total_slots && *cfg.total_slots < cfg.pmas)
        throw GenerationError("total_slots below one slot per PMA");
}

RawPopulation make_binary(std::string id, std::vector<CandidateId> members) {
    RawPopulation p;
    p.id = std::move(id);
    p.name = p.id;
    p.kind = PopulationKind::binary;
    std::sort(members.begin(), members.end());
    p.members = std::move(members);
    return p;
}

void maybe_constrain(RawPopulation& p, const GenConfig& cfg, Rng& rng, bool allow_target) {
    const auto size = static_cast<int>(p.members.size());
    if (size == 0) return;
    if (allow_target && rng.next_bool(cfg.min_target_density))
        p.min_target = static_cast<int>(rng.next_int(1, std::min(2, size)));
    if (rng.next_bool(cfg.max_quota_density))
        p.max_quota = static_cast<int>(rng.next_int(std::max(p.min_target, 1), size));
}

// Populations over one PMA's ranked set, shaped per mode.
std::vector<RawPopulation> make_populations(const std::string& prefix,
                                            std::vector<CandidateId> ranked,
                                            const GenConfig& cfg, Rng& rng) {
    std::vector<RawPopulation> pops;
    if (ranked.empty()) return pops;
    const int want = static_cast<int>(rng.next_int(cfg.pops_min, cfg.pops_max));
    if (want == 0) return pops;
    rng.shuffle(ranked);
    int made = 0;

    switch (cfg.mode) {
        case GenMode::laminar_disjoint_targets: {
            // Disjoint blocks; targets only on blocks, an optional enclosing
            // quota-only parent keeps the family laminar.
            std::size_t at = 0;
            std::vector<std::vector<CandidateId>> blocks;
            while (at < ranked.size() && made < want) {
                const auto len = static_cast<std::size_t>(
                    rng.next_int(1, std::min<std::int64_t>(3, ranked.size() - at)));
                blocks.emplace_back(ranked.begin() + at, ranked.begin() + at + len);
                at += len;
                ++made;
            }
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                auto p = make_binary(prefix + "b" + std::to_string(b), blocks[b]);
                maybe_constrain(p, cfg, rng, true);
                pops.push_back(std::move(p));
            }
            if (blocks.size() >= 2 && rng.next_bool(0.4)) {
                std::vector<CandidateId> merged = blocks[0];
                merged.insert(merged.end(), blocks[1].begin(), blocks[1].end());
                auto p = make_binary(prefix + "parent", std::move(merged));
                maybe_constrain(p, cfg, rng, false);
                pops.push_back(std::move(p));
            }
            break;
        }
        case GenMode::laminar_chain_targets: {
            // Nested prefixes form chains; several chains sit on disjoint
            // slices of the ranked set.
            std::size_t at = 0;
            int chain = 0;
            while (at < ranked.size() && made < want) {
                const auto room = ranked.size() - at;
                const auto base = static_cast<std::size_t>(
                    rng.next_int(1, std::min<std::int64_t>(2, room)));
                std::size_t len = base;
                int depth = 0;
                while (made < want && at + len <= ranked.size() && depth < 3) {
                    auto p = make_binary(
                        prefix + "c" + std::to_string(chain) + "_" + std::to_string(depth),
                        {ranked.begin() + at, ranked.begin() + at + len});
                    maybe_constrain(p, cfg, rng, true);
                    pops.push_back(std::move(p));
                    ++made;
                    ++depth;
                    const auto grow = static_cast<std::size_t>(rng.next_int(1, 2));
                    if (at + len + grow > ranked.size()) break;
                    len += grow;
                }
                at += len;
                ++chain;
            }
            break;
        }
        case GenMode::arbitrary_intersecting: {
            for (; made < want; ++made) {
                std::vector<CandidateId> members;
                for (const auto& c : ranked)
                    if (rng.next_bool(0.5)) members.push_back(c);
                if (members.empty()) members.push_back(ranked[0]);
                auto p = make_binary(prefix + "p" + std::to_string(made), std::move(members));
                maybe_constrain(p, cfg, rng, true);
                pops.push_back(std::move(p));
            }
            break;
        }
    }
    return pops;
}

void enforce_mode(const Market& market, GenMode mode) {
    for (const auto& r : market.reports) {
        const auto pops = expand_populations(r.populations);
        switch (mode) {
            case GenMode::laminar_disjoint_targets:
                if (!is_laminar(pops) || !min_targets_pairwise_disjoint(pops))
                    throw GenerationError("generator broke laminar-disjoint mode at PMA " +
                                          r.pma);
                break;
            case GenMode::laminar_chain_targets:
                if (!is_laminar(pops) || !min_targets_disjoint_chains(pops))
                    throw GenerationError("generator broke laminar-chain mode at PMA " +
                                          r.pma);
                break;
            case GenMode::arbitrary_intersecting: break;
        }
    }
}

}  // namespace

Market generate(const GenConfig& cfg) {
    check_config(cfg);
    Rng rng(cfg.seed);
    Market mkt;
    mkt.tie_break_seed = rng.next_u64();

    std::vector<double> candidate_common(cfg.candidates);
    for (auto& v : candidate_common) v = rng.next_double();
    std::vector<double> pma_common(cfg.pmas);
    for (auto& v : pma_common) v = rng.next_double();

    std::vector<PmaId> pma_ids;
    for (int m = 0; m < cfg.pmas; ++m) pma_ids.push_back("m" + std::to_string(m));

    // Candidate lists: top-L PMAs by alpha * common + (1 - alpha) * noise.
    for (int i = 0; i < cfg.candidates; ++i) {
        Candidate c;
        c.id = "c" + std::to_string(i);
        std::vector<std::pair<double, int>> scored;
        for (int m = 0; m < cfg.pmas; ++m)
            scored.emplace_back(
                -(cfg.alpha * pma_common[m] + (1.0 - cfg.alpha) * rng.next_double()), m);
        std::sort(scored.begin(), scored.end());
        const auto len = std::min<std::int64_t>(rng.next_int(cfg.list_min, cfg.list_max),
                                                cfg.pmas);
        for (std::int64_t k = 0; k < len; ++k) c.preferences.push_back(pma_ids[scored[k].second]);
        mkt.candidates.push_back(std::move(c));
    }

    std::vector<int> capacities(cfg.pmas);
    for (auto& cap : capacities)
        cap = static_cast<int>(rng.next_int(cfg.slots_min, cfg.slots_max));
    if (cfg.total_slots && cfg.pmas > 0) {
        int sum = std::accumulate(capacities.begin(), capacities.end(), 0);
        for (int m = 0; sum < *cfg.total_slots; m = (m + 1) % cfg.pmas) {
            ++capacities[m];
            ++sum;
        }
        for (int m = 0; sum > *cfg.total_slots; m = (m + 1) % cfg.pmas)
            if (capacities[m] > 1) {
                --capacities[m];
                --sum;
            }
    }

    for (int m = 0; m < cfg.pmas; ++m) {
        PreferenceReport rep;
        rep.pma = pma_ids[m];
        rep.capacity = capacities[m];

        // The PMA ranks whoever listed it, scored like the candidate side.
        std::vector<std::pair<double, CandidateId>> scored;
        for (int i = 0; i < cfg.candidates; ++i) {
            const auto& c = mkt.candidates[i];
            if (std::find(c.preferences.begin(), c.preferences.end(), rep.pma) ==
                c.preferences.end())
                continue;
            scored.emplace_back(
                -(cfg.alpha * candidate_common[i] + (1.0 - cfg.alpha) * rng.next_double()),
                c.id);
        }
        std::sort(scored.begin(), scored.end());
        int rank = 0;
        std::vector<CandidateId> ranked;
        for (std::size_t k = 0; k < scored.size(); ++k) {
            if (k == 0 || !rng.next_bool(cfg.tie_probability)) ++rank;
            rep.ranking[scored[k].second] = rank;
            ranked.push_back(scored[k].second);
        }
        rep.populations = make_populations("m" + std::to_string(m) + "_", ranked, cfg, rng);
        mkt.reports.push_back(std::move(rep));
    }

    enforce_mode(mkt, cfg.mode);
    const auto vr = validate(mkt);
    if (!vr.ok())
        throw GenerationError("generator produced an invalid market: " +
                              vr.violations.front().message);
    return mkt;
}

GeneratedReport generate_report(const GenConfig& cfg) {
    check_config(cfg);
    Rng rng(cfg.seed);
    GeneratedReport out;
    out.report.pma = "m";
    out.report.capacity =
        cfg.candidates > 0 ? static_cast<int>(rng.next_int(1, cfg.candidates)) : 1;

    for (int i = 0; i < cfg.candidates; ++i) out.universe.push_back("c" + std::to_string(i));

    auto scored = out.universe;
    rng.shuffle(scored);
    int rank = 0;
    for (std::size_t k = 0; k < scored.size(); ++k) {
        if (k == 0 || !rng.next_bool(cfg.tie_probability)) ++rank;
        out.report.ranking[scored[k]] = rank;
    }
    out.report.populations = make_populations("", scored, cfg, rng);
    out.strict = make_strict_report(out.report, scored);
    return out;
}

}  // namespace popmatch::synth
