// Corpus-level observations frozen against the deterministic generator:
// what the repair stages and the Boston baseline do across seeded families
// contended enough for blocking pairs to actually occur.

#include <doctest.h>

#include "popmatch/audit.hpp"
#include "popmatch/engine.hpp"
#include "popmatch/synth.hpp"

using namespace popmatch;

namespace {

synth::GenConfig family_c(int i) {
    synth::GenConfig cfg;
    cfg.candidates = 6 + i % 4;
    cfg.pmas = 3;
    cfg.slots_min = 1;
    cfg.slots_max = 3;
    cfg.pops_min = 2;
    cfg.pops_max = 4;
    cfg.min_target_density = 0.6;
    cfg.max_quota_density = 0.8;
    cfg.list_min = 2;
    cfg.list_max = 3;
    cfg.alpha = 0.7;
    cfg.tie_probability = 0.25;
    cfg.mode = synth::GenMode::arbitrary_intersecting;
    cfg.seed = 333000 + static_cast<std::uint64_t>(i);
    return cfg;
}

synth::GenConfig family_d(int i) {
    synth::GenConfig cfg;
    cfg.candidates = 7 + i % 4;
    cfg.pmas = 3;
    cfg.slots_min = 2;
    cfg.slots_max = 3;
    cfg.pops_min = 2;
    cfg.pops_max = 4;
    cfg.min_target_density = 0.4;
    cfg.max_quota_density = 1.0;
    cfg.list_min = 2;
    cfg.list_max = 4;
    cfg.alpha = 0.6;
    cfg.tie_probability = 0.25;
    cfg.mode = synth::GenMode::arbitrary_intersecting;
    cfg.seed = 444000 + static_cast<std::uint64_t>(i);
    return cfg;
}

ChoiceKind kind_of(int i) {
    return i % 2 == 0 ? ChoiceKind::y2018 : ChoiceKind::prefer_more;
}

}  // namespace

TEST_CASE("candidate stage cuts blocking pairs on the contended corpus") {
    long before = 0, after = 0;
    int resolutions = 0, increased = 0;
    for (int i = 0; i < 600; ++i) {
        const auto sm = apply_tie_breaking(synth::generate(family_c(i)));
        const auto kind = kind_of(i);
        const auto da = run_da(sm, kind, false);
        const auto b = find_blocking_pairs_serial(sm, kind, da.matching).size();
        const auto stage = candidate_pareto_stage(sm, kind, da.matching);
        const auto a = find_blocking_pairs_serial(sm, kind, stage.matching).size();
        before += static_cast<long>(b);
        after += static_cast<long>(a);
        resolutions += static_cast<int>(stage.resolutions.size());
        if (a > b) ++increased;
    }
    // Frozen against this seeded family: three free-slot resolutions cut the
    // corpus total from 10 to 6 and no instance gets worse.
    CHECK(before == 10);
    CHECK(after == 6);
    CHECK(resolutions == 3);
    CHECK(increased == 0);
}

TEST_CASE("alternation never trails the candidate-only pipeline on the corpus") {
    long candidate_only = 0, alternate = 0;
    int worse = 0;
    for (int i = 0; i < 600; ++i) {
        const auto sm = apply_tie_breaking(synth::generate(family_d(i)));
        const auto kind = kind_of(i);
        const auto nc = find_blocking_pairs_serial(
                            sm, kind,
                            run_pipeline(sm, {kind, ParetoMode::candidate_only, 100}).matching)
                            .size();
        const auto na = find_blocking_pairs_serial(
                            sm, kind,
                            run_pipeline(sm, {kind, ParetoMode::alternate, 100}).matching)
                            .size();
        candidate_only += static_cast<long>(nc);
        alternate += static_cast<long>(na);
        if (na > nc) ++worse;
    }
    CHECK(worse == 0);
    CHECK(candidate_only == 10);
    CHECK(alternate == 10);
}

TEST_CASE("boston trails the pipeline on the large majority of instances") {
    long boston_total = 0, pipeline_total = 0;
    int boston_better = 0;
    for (int i = 0; i < 600; ++i) {
        const auto sm = apply_tie_breaking(synth::generate(family_d(i)));
        const auto kind = kind_of(i);
        const auto np = find_blocking_pairs_serial(
                            sm, kind,
                            run_pipeline(sm, {kind, ParetoMode::candidate_only, 100}).matching)
                            .size();
        const auto nb =
            find_blocking_pairs_serial(sm, kind, run_boston(sm, kind)).size();
        pipeline_total += static_cast<long>(np);
        boston_total += static_cast<long>(nb);
        if (nb < np) ++boston_better;
    }
    // Frozen distribution: 672 Boston pairs against 10, with Boston strictly
    // better on only 2 of 600 instances.
    CHECK(boston_total == 672);
    CHECK(pipeline_total == 10);
    CHECK(boston_better == 2);
}
