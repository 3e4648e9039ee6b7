#include <doctest.h>

#include <array>

#include "popmatch/io.hpp"
#include "popmatch/structure.hpp"
#include "popmatch/synth.hpp"

using namespace popmatch;
using namespace popmatch::synth;

TEST_CASE("generation is deterministic in the seed") {
    GenConfig cfg;
    cfg.candidates = 10;
    cfg.pmas = 4;
    cfg.pops_min = 1;
    cfg.pops_max = 4;
    cfg.seed = 99;
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    CHECK(io::market_to_json_text(a) == io::market_to_json_text(b));
    cfg.seed = 100;
    CHECK(io::market_to_json_text(a) != io::market_to_json_text(generate(cfg)));
}

TEST_CASE("laminar-disjoint mode satisfies the first guarantee's hypotheses") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GenConfig cfg;
        cfg.mode = GenMode::laminar_disjoint_targets;
        cfg.candidates = 4 + static_cast<int>(seed % 5);
        cfg.pmas = 3;
        cfg.pops_min = 1;
        cfg.pops_max = 3;
        cfg.seed = seed;
        const auto market = generate(cfg);
        CHECK(guarantees(market, ChoiceKind::y2018).guarantee ==
              Guarantee::stable_and_strategyproof_alg1);
    }
}

TEST_CASE("laminar-chain mode satisfies the second guarantee's hypotheses") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GenConfig cfg;
        cfg.mode = GenMode::laminar_chain_targets;
        cfg.candidates = 4 + static_cast<int>(seed % 5);
        cfg.pmas = 3;
        cfg.pops_min = 1;
        cfg.pops_max = 4;
        cfg.seed = seed;
        const auto market = generate(cfg);
        CHECK(guarantees(market, ChoiceKind::prefer_more).guarantee ==
              Guarantee::stable_and_strategyproof_alg2);
    }
}

TEST_CASE("generated markets always validate") {
    for (std::uint64_t seed = 500; seed < 560; ++seed) {
        GenConfig cfg;
        cfg.mode = std::array{GenMode::laminar_disjoint_targets, GenMode::laminar_chain_targets,
                              GenMode::arbitrary_intersecting}[seed % 3];
        cfg.candidates = static_cast<int>(seed % 9);
        cfg.pmas = static_cast<int>(seed % 4);
        cfg.pops_min = 0;
        cfg.pops_max = 3;
        cfg.seed = seed;
        CHECK(validate(generate(cfg)).ok());
    }
}

TEST_CASE("an empty candidate pool yields an empty valid market") {
    GenConfig cfg;
    cfg.candidates = 0;
    cfg.pmas = 2;
    cfg.pops_min = 0;
    cfg.pops_max = 0;
    const auto market = generate(cfg);
    CHECK(market.candidates.empty());
    CHECK(validate(market).ok());
}

TEST_CASE("unsatisfiable configurations are rejected") {
    GenConfig cfg;
    cfg.candidates = 2;
    cfg.pops_min = 5;
    cfg.pops_max = 6;
    cfg.mode = GenMode::laminar_disjoint_targets;
    CHECK_THROWS_AS(generate(cfg), GenerationError);

    GenConfig bad_slots;
    bad_slots.slots_min = 3;
    bad_slots.slots_max = 2;
    CHECK_THROWS_AS(generate(bad_slots), GenerationError);

    GenConfig bad_alpha;
    bad_alpha.alpha = 1.5;
    CHECK_THROWS_AS(generate(bad_alpha), GenerationError);
}

TEST_CASE("total slots are hit exactly when requested") {
    GenConfig cfg;
    cfg.candidates = 40;
    cfg.pmas = 7;
    cfg.slots_min = 2;
    cfg.slots_max = 9;
    cfg.total_slots = 33;
    cfg.seed = 3;
    const auto market = generate(cfg);
    int total = 0;
    for (const auto& r : market.reports) total += r.capacity;
    CHECK(total == 33);
}

TEST_CASE("report generation covers the universe and respects the mode") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GenConfig cfg;
        cfg.candidates = 3 + static_cast<int>(seed % 5);
        cfg.pmas = 1;
        cfg.pops_min = 1;
        cfg.pops_max = 3;
        cfg.mode = GenMode::laminar_disjoint_targets;
        cfg.seed = seed;
        const auto gen = generate_report(cfg);
        CHECK(gen.report.ranking.size() == gen.universe.size());
        const auto pops = expand_populations(gen.report.populations);
        CHECK(is_laminar(pops));
        CHECK(min_targets_pairwise_disjoint(pops));
    }
}
