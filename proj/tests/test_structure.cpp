#include <doctest.h>

#include "popmatch/oracle.hpp"
#include "popmatch/structure.hpp"
#include "popmatch/synth.hpp"

using namespace popmatch;

namespace {

Population pop(std::string id, std::vector<CandidateId> members, int target = 0,
               std::optional<int> quota = std::nullopt) {
    Population p;
    p.id = std::move(id);
    p.name = p.id;
    std::sort(members.begin(), members.end());
    p.members = std::move(members);
    p.min_target = target;
    p.max_quota = quota;
    return p;
}

}  // namespace

TEST_CASE("a chain is laminar") {
    CHECK(is_laminar({pop("cde", {"c", "d", "e"}, 1), pop("de", {"d", "e"}, 0, 1),
                      pop("e", {"e"}, 1)}));
    CHECK(is_laminar({pop("only", {"a", "b"})}));
    CHECK(is_laminar({}));
}

TEST_CASE("crossing populations are not laminar and carry a witness") {
    std::optional<LaminarWitness> w;
    CHECK(!is_laminar({pop("cd", {"c", "d"}, 0, 1), pop("de", {"d", "e"}, 0, 1)}, &w));
    REQUIRE(w.has_value());
    CHECK(w->pop_a == "cd");
    CHECK(w->pop_b == "de");
    CHECK(w->only_a == "c");
    CHECK(w->shared == "d");
    CHECK(w->only_b == "e");
}

TEST_CASE("intersecting minimum targets are detected") {
    std::optional<IntersectionWitness> w;
    CHECK(!min_targets_pairwise_disjoint(
        {pop("cde", {"c", "d", "e"}, 1), pop("de", {"d", "e"}, 0, 1), pop("e", {"e"}, 1)},
        &w));
    REQUIRE(w.has_value());
    CHECK(w->pop_a == "cde");
    CHECK(w->pop_b == "e");
    CHECK(w->shared == "e");
}

TEST_CASE("zero targets are vacuously disjoint") {
    CHECK(min_targets_pairwise_disjoint(
        {pop("a", {"a", "b"}, 0, 1), pop("b", {"b", "c"}, 0, 2)}));
}

TEST_CASE("two disjoint gender populations with targets are disjoint") {
    auto men = pop("men", {"a", "b"}, 1);
    men.is_gender = true;
    auto women = pop("women", {"c", "d"}, 1);
    women.is_gender = true;
    CHECK(min_targets_pairwise_disjoint({men, women}));
}

TEST_CASE("nested targets form a chain") {
    CHECK(min_targets_disjoint_chains(
        {pop("cde", {"c", "d", "e"}, 1), pop("de", {"d", "e"}, 0, 1), pop("e", {"e"}, 1)}));
}

TEST_CASE("a branching target family is not a chain union") {
    std::optional<ChainWitness> w;
    CHECK(!min_targets_disjoint_chains({pop("all", {"a", "b", "c"}, 1), pop("a", {"a"}, 1),
                                        pop("b", {"b"}, 1)},
                                       &w));
    REQUIRE(w.has_value());
    CHECK(w->container == "all");
}

TEST_CASE("pairwise-disjoint targets are a chain union") {
    CHECK(min_targets_disjoint_chains({pop("a", {"a"}, 1), pop("b", {"b"}, 1),
                                       pop("ab", {"a", "b"}, 0, 2)}));
}

TEST_CASE("the chain question is refused on non-laminar input") {
    CHECK_THROWS_AS(
        min_targets_disjoint_chains({pop("cd", {"c", "d"}, 1), pop("de", {"d", "e"}, 1)}),
        ValidationError);
}

TEST_CASE("guarantees follow the structure flags and the kind") {
    const auto market = oracle::fixture(oracle::FixtureId::thm3_no_stable);

    const auto r2018 = guarantees(market, ChoiceKind::y2018);
    CHECK(r2018.guarantee == Guarantee::none);
    REQUIRE(r2018.pmas.size() == 2);
    CHECK(r2018.pmas[0].laminar);
    CHECK(!r2018.pmas[0].min_targets_pairwise_disjoint);
    CHECK(r2018.pmas[0].min_targets_disjoint_chains);

    const auto rpm = guarantees(market, ChoiceKind::prefer_more);
    CHECK(rpm.guarantee == Guarantee::stable_and_strategyproof_alg2);
    CHECK(guarantees(market, ChoiceKind::prefer_more_staged).guarantee ==
          Guarantee::stable_and_strategyproof_alg2);
    CHECK(guarantees(market, ChoiceKind::y2019).guarantee == Guarantee::none);
}

TEST_CASE("a market without populations earns both guarantees") {
    Market mkt;
    mkt.candidates = {{"a", {"m"}, {}}};
    PreferenceReport rep;
    rep.pma = "m";
    rep.capacity = 1;
    rep.ranking = {{"a", 1}};
    mkt.reports = {rep};
    CHECK(guarantees(mkt, ChoiceKind::y2018).guarantee ==
          Guarantee::stable_and_strategyproof_alg1);
    CHECK(guarantees(mkt, ChoiceKind::prefer_more).guarantee ==
          Guarantee::stable_and_strategyproof_alg2);
}

TEST_CASE("non-laminar populations forfeit both guarantees") {
    const auto market = oracle::fixture(oracle::FixtureId::footnote26_free_slot);
    CHECK(guarantees(market, ChoiceKind::y2018).guarantee == Guarantee::none);
    CHECK(guarantees(market, ChoiceKind::prefer_more).guarantee == Guarantee::none);
    CHECK(!guarantees(market, ChoiceKind::y2018).pmas[0].laminar);
}

TEST_CASE("pairwise-disjoint targets imply the chain property on generated families") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        synth::GenConfig cfg;
        cfg.candidates = 4 + static_cast<int>(seed % 5);
        cfg.pmas = 2;
        cfg.pops_min = 1;
        cfg.pops_max = 4;
        cfg.mode = (seed % 2 == 0) ? synth::GenMode::laminar_disjoint_targets
                                   : synth::GenMode::arbitrary_intersecting;
        cfg.seed = seed;
        const auto market = synth::generate(cfg);
        for (const auto& r : market.reports) {
            const auto pops = expand_populations(r.populations);
            if (min_targets_pairwise_disjoint(pops) && is_laminar(pops))
                CHECK(min_targets_disjoint_chains(pops));
        }
    }
}
