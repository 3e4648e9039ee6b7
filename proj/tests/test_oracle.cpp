#include <doctest.h>

#include <set>

#include "popmatch/audit.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/synth.hpp"

using namespace popmatch;
using namespace popmatch::oracle;

TEST_CASE("no stable matching exists for the intersecting-targets instance") {
    const auto sm = apply_tie_breaking(fixture(FixtureId::thm3_no_stable));
    CHECK(brute_force_stable_matchings(sm, ChoiceKind::y2018).empty());
}

TEST_CASE("the same instance is stabilizable under prefer-more") {
    const auto sm = apply_tie_breaking(fixture(FixtureId::thm3_no_stable));
    const auto stable = brute_force_stable_matchings(sm, ChoiceKind::prefer_more);
    REQUIRE(!stable.empty());
    for (const auto& m : stable) CHECK(is_stable(sm, ChoiceKind::prefer_more, m));
}

TEST_CASE("a single mutually acceptable pair has exactly one stable matching") {
    Market mkt;
    mkt.candidates = {{"her", {"m"}, {}}};
    PreferenceReport rep;
    rep.pma = "m";
    rep.capacity = 1;
    rep.ranking = {{"her", 1}};
    mkt.reports = {rep};
    const auto stable =
        brute_force_stable_matchings(apply_tie_breaking(mkt), ChoiceKind::y2018);
    REQUIRE(stable.size() == 1);
    CHECK(stable[0].pma_of("her") == PmaId("m"));
}

TEST_CASE("enumeration bounds are refusals, not truncations") {
    synth::GenConfig cfg;
    cfg.candidates = 9;
    cfg.pmas = 3;
    cfg.seed = 1;
    const auto sm = apply_tie_breaking(synth::generate(cfg));
    CHECK_THROWS_AS(brute_force_stable_matchings(sm, ChoiceKind::y2018), BoundExceeded);
    CHECK_NOTHROW(brute_force_stable_matchings(sm, ChoiceKind::y2018, {9, 4}));
}

TEST_CASE("choice properties hold without minimum targets on laminar populations") {
    PreferenceReport rep;
    rep.pma = "m";
    rep.capacity = 3;
    rep.ranking = {{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}};
    RawPopulation outer, inner;
    outer.id = "outer";
    outer.members = {"a", "b", "c"};
    outer.max_quota = 2;
    inner.id = "inner";
    inner.members = {"a", "b"};
    inner.max_quota = 1;
    rep.populations = {outer, inner};
    const auto sr = make_strict_report(rep, {"a", "b", "c", "d"});
    CHECK(check_choice_properties(sr, ChoiceKind::y2018).clean());
    CHECK(check_choice_properties(sr, ChoiceKind::prefer_more).clean());
}

TEST_CASE("the intersecting-targets report violates substitutability under 2018 choice") {
    const auto sm = apply_tie_breaking(fixture(FixtureId::thm3_no_stable));
    const auto report = check_choice_properties(sm.reports[0], ChoiceKind::y2018);
    const auto* v = report.first("substitutability");
    REQUIRE(v != nullptr);
    // Removing c from {c,d,e}: {c,e} collapses to {d}, expelling e.
    CHECK(v->subset == std::vector<CandidateId>{"c", "d", "e"});
    CHECK(v->removed == "c");
    CHECK(v->chosen_full == std::vector<CandidateId>{"c", "e"});
    CHECK(v->chosen_reduced == std::vector<CandidateId>{"d"});
}

TEST_CASE("prefer-more on a chain structure satisfies the one-removal form") {
    const auto sm = apply_tie_breaking(fixture(FixtureId::thm3_no_stable));
    const auto report = check_choice_properties(sm.reports[0], ChoiceKind::prefer_more);
    CHECK(report.clean());
}

TEST_CASE("the property check refuses oversized universes") {
    PreferenceReport rep;
    rep.pma = "m";
    rep.capacity = 1;
    std::vector<CandidateId> order;
    for (int i = 0; i < 8; ++i) {
        rep.ranking["c" + std::to_string(i)] = i + 1;
        order.push_back("c" + std::to_string(i));
    }
    const auto sr = make_strict_report(rep, order);
    CHECK_THROWS_AS(check_choice_properties(sr, ChoiceKind::y2018), BoundExceeded);
    CHECK_NOTHROW(check_choice_properties(sr, ChoiceKind::y2018, 8));
}

TEST_CASE("the misreport enumeration finds e's profitable deviation") {
    const auto market = fixture(FixtureId::thm3_strategyproofness);
    const auto rep = check_strategyproofness_exhaustive(
        market, {ChoiceKind::y2018, ParetoMode::none, 100}, "e");
    REQUIRE(!rep.clean());
    bool found = false;
    for (const auto& m : rep.profitable) {
        if (m.misreport == std::vector<PmaId>{"m2", "m1"}) {
            found = true;
            CHECK(!m.truthful_outcome.has_value());
            CHECK(m.manipulated_outcome == PmaId("m1"));
        }
    }
    CHECK(found);
}

TEST_CASE("nobody else in that market can manipulate") {
    const auto market = fixture(FixtureId::thm3_strategyproofness);
    for (const auto& cand : {"c", "d", "f", "g"}) {
        const auto rep = check_strategyproofness_exhaustive(
            market, {ChoiceKind::y2018, ParetoMode::none, 100}, cand);
        CHECK(rep.clean());
    }
}

TEST_CASE("a single-candidate market admits no manipulation") {
    Market mkt;
    mkt.candidates = {{"solo", {"m"}, {}}};
    PreferenceReport rep;
    rep.pma = "m";
    rep.capacity = 1;
    rep.ranking = {{"solo", 1}};
    mkt.reports = {rep};
    CHECK(check_strategyproofness_exhaustive(mkt, {ChoiceKind::y2018, ParetoMode::none, 100},
                                             "solo")
              .clean());
}

TEST_CASE("truncation is safe under pure deferred acceptance") {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        synth::GenConfig cfg;
        cfg.candidates = 4 + static_cast<int>(seed % 4);
        cfg.pmas = 3;
        cfg.pops_min = 1;
        cfg.pops_max = 3;
        cfg.seed = seed;
        const auto market = synth::generate(cfg);
        for (auto kind : {ChoiceKind::y2018, ChoiceKind::prefer_more})
            CHECK(check_truncation_safety(market, {kind, ParetoMode::none, 100}).clean());
    }
}

TEST_CASE("the candidate stage can make truncation profitable") {
    // Regression pin for the instance found by the randomized search.
    synth::GenConfig cfg;
    cfg.candidates = 3 + static_cast<int>(20280884u % 5);
    cfg.pmas = 2 + static_cast<int>(20280884u % 2);
    cfg.slots_min = 1;
    cfg.slots_max = 3;
    cfg.pops_min = 1;
    cfg.pops_max = 3;
    cfg.list_min = 1;
    cfg.list_max = 3;
    cfg.tie_probability = 0.25;
    cfg.seed = 20280884;
    const auto market = synth::generate(cfg);
    const auto rep =
        check_truncation_safety(market, {ChoiceKind::y2018, ParetoMode::candidate_only, 100});
    CHECK(!rep.clean());
}

TEST_CASE("a guaranteed slot stays guaranteed under any list containing it") {
    Market mkt;
    mkt.candidates = {{"star", {"m", "z"}, {}}, {"other", {"m"}, {}}};
    PreferenceReport m, z;
    m.pma = "m";
    m.capacity = 1;
    m.ranking = {{"star", 1}, {"other", 2}};
    z.pma = "z";
    z.capacity = 1;
    z.ranking = {{"star", 1}};
    mkt.reports = {m, z};

    const PipelineConfig config{ChoiceKind::y2018, ParetoMode::alternate, 20};
    const auto rep = check_sure_thing(mkt, config, "star", "m");
    CHECK(rep.applicable);
    CHECK(rep.clean());
    CHECK(rep.lists_tried > 0);
}

TEST_CASE("a candidate listing only the guaranteed PMA lands there") {
    Market mkt;
    mkt.candidates = {{"only", {"m"}, {}}};
    PreferenceReport m;
    m.pma = "m";
    m.capacity = 1;
    m.ranking = {{"only", 1}};
    mkt.reports = {m};
    const auto rep =
        check_sure_thing(mkt, {ChoiceKind::y2018, ParetoMode::alternate, 20}, "only", "m");
    CHECK(rep.applicable);
    CHECK(rep.clean());
}

TEST_CASE("the guarantee precondition is verified, not assumed") {
    const auto market = fixture(FixtureId::thm3_no_stable);
    // m1 can reject d (from {c,d,e}), so d holds no guarantee there.
    const auto rep = check_sure_thing(market, {ChoiceKind::y2018, ParetoMode::none, 100},
                                      "d", "m1");
    CHECK(!rep.applicable);
}

TEST_CASE("the free-slot fixture leaves a resolvable pair after DA") {
    const auto sm = apply_tie_breaking(fixture(FixtureId::footnote26_free_slot));
    const auto da = run_da(sm, ChoiceKind::y2018);
    CHECK(da.matching.pma_of("e") == PmaId("m1"));
    CHECK(!da.matching.pma_of("c"));
    CHECK(!da.matching.pma_of("d"));
    const auto free_slots = find_free_slot_blocking_pairs(sm, ChoiceKind::y2018, da.matching);
    REQUIRE(free_slots.size() == 1);
    CHECK(free_slots[0].first == "m1");
    CHECK(free_slots[0].second == "c");
}
