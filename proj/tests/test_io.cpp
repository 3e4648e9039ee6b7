#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "popmatch/engine.hpp"
#include "popmatch/io.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/synth.hpp"

using namespace popmatch;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("popmatch_io_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Market rich_market() {
    Market mkt;
    mkt.tie_break_seed = 4242;
    mkt.candidates = {{"c,1", {"m one", "m2"}, {{"school", "A"}, {"town", "Tel Aviv"}}},
                      {"c2", {"m2"}, {{"school", "B"}}},
                      {"c3", {}, {}}};
    PreferenceReport m1;
    m1.pma = "m one";
    m1.capacity = 2;
    m1.ranking = {{"c,1", 1}, {"c2", 1}};
    RawPopulation school;
    school.id = "School";
    school.kind = PopulationKind::multi_valued;
    school.values = {{"c,1", "A"}, {"c2", "B"}};
    school.max_quota = 5;
    school.overrides = {{"A", 7}};
    RawPopulation gender;
    gender.id = "F";
    gender.members = {"c,1"};
    gender.is_gender = true;
    gender.min_target = 1;
    m1.populations = {school, gender};
    PreferenceReport m2;
    m2.pma = "m2";
    m2.capacity = 1;
    m2.ranking = {{"c,1", 1}, {"c2", 2}};
    mkt.reports = {m1, m2};
    return mkt;
}

}  // namespace

TEST_CASE("market JSON round-trips exactly") {
    const auto market = rich_market();
    const auto text = io::market_to_json_text(market);
    const auto back = io::market_from_json_text(text);
    CHECK(io::market_to_json_text(back) == text);
}

TEST_CASE("market CSV round-trips through the JSON canonical form") {
    const auto market = rich_market();
    const auto dir = temp_dir("csv");
    io::save_market_csv(market, dir);
    const auto back = io::load_market_csv(dir);
    CHECK(io::market_to_json_text(back) == io::market_to_json_text(market));
    fs::remove_all(dir);
}

TEST_CASE("csv parsing honors quoting") {
    const auto rows = io::parse_csv("a,\"b,c\",\"d\"\"e\"\nf,,\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(rows[1] == std::vector<std::string>{"f", "", ""});
    CHECK(io::csv_escape("plain") == "plain");
    CHECK(io::csv_escape("a,b") == "\"a,b\"");
    CHECK(io::csv_escape("q\"q") == "\"q\"\"q\"");
}

TEST_CASE("artifacts are byte-identical across reruns") {
    const auto market = oracle::fixture(oracle::FixtureId::thm3_strategyproofness);
    const auto sm = apply_tie_breaking(market);
    const auto out = run_pipeline(sm, {ChoiceKind::y2018, ParetoMode::candidate_only, 100});
    const auto dir = temp_dir("repro");

    io::save_matching_json(out.matching, market, dir / "a.json");
    io::save_matching_json(out.matching, market, dir / "b.json");
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

    io::save_outcome_json(out, market, dir / "oa.json");
    io::save_outcome_json(out, market, dir / "ob.json");
    CHECK(slurp(dir / "oa.json") == slurp(dir / "ob.json"));
    fs::remove_all(dir);
}

TEST_CASE("matchings round-trip") {
    const auto market = oracle::fixture(oracle::FixtureId::thm3_strategyproofness);
    const auto sm = apply_tie_breaking(market);
    const auto out = run_da(sm, ChoiceKind::y2018);
    const auto dir = temp_dir("matching");
    io::save_matching_json(out.matching, market, dir / "m.json");
    CHECK(io::load_matching_json(dir / "m.json") == out.matching);
    fs::remove_all(dir);
}

TEST_CASE("malformed input raises io errors") {
    const auto dir = temp_dir("bad");
    std::ofstream(dir / "bad.json") << "{ nope";
    CHECK_THROWS_AS(io::load_market_json(dir / "bad.json"), IoError);
    CHECK_THROWS_AS(io::load_market_json(dir / "missing.json"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("generator configs load from JSON") {
    const auto dir = temp_dir("cfg");
    std::ofstream(dir / "gen.json") << R"({
        "candidates": 20, "pmas": 4, "slots": [2, 5], "mode": "laminar-chain",
        "populations": [1, 3], "alpha": 0.25, "list_length": [1, 4],
        "tie_probability": 0.5, "seed": 77
    })";
    const auto cfg = io::load_gen_config_json(dir / "gen.json");
    CHECK(cfg.candidates == 20);
    CHECK(cfg.pmas == 4);
    CHECK(cfg.slots_min == 2);
    CHECK(cfg.slots_max == 5);
    CHECK(cfg.mode == synth::GenMode::laminar_chain_targets);
    CHECK(cfg.alpha == doctest::Approx(0.25));
    CHECK(cfg.seed == 77);
    fs::remove_all(dir);
}

TEST_CASE("generated markets survive the CSV round trip") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        synth::GenConfig cfg;
        cfg.candidates = 6;
        cfg.pmas = 3;
        cfg.pops_min = 1;
        cfg.pops_max = 3;
        cfg.seed = seed;
        const auto market = synth::generate(cfg);
        const auto dir = temp_dir("gen" + std::to_string(seed));
        io::save_market_csv(market, dir);
        CHECK(io::market_to_json_text(io::load_market_csv(dir)) ==
              io::market_to_json_text(market));
        fs::remove_all(dir);
    }
}
