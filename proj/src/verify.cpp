#include "popmatch/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <set>
#include <sstream>

#include "popmatch/audit.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/structure.hpp"
#include "popmatch/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace popmatch::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct SuiteRunner {
    SuiteResult result;
    Clock::time_point start = Clock::now();

    explicit SuiteRunner(std::string name) { result.name = std::move(name); }

    void fail(const std::string& detail) {
        ++result.failures;
        if (result.detail.empty()) result.detail = detail;
    }

    SuiteResult finish() {
        result.seconds = seconds_since(start);
        result.passed = result.failures == 0;
        return result;
    }
};

synth::GenConfig corpus_config(synth::GenMode mode, std::uint64_t seed, int max_candidates,
                               int max_pmas) {
    synth::GenConfig cfg;
    cfg.mode = mode;
    cfg.candidates = 3 + static_cast<int>(seed % (max_candidates - 2));
    cfg.pmas = std::min<int>(max_pmas, 2 + static_cast<int>(seed % 2));
    cfg.slots_min = 1;
    cfg.slots_max = 3;
    cfg.pops_min = 1;
    cfg.pops_max = 3;
    cfg.list_min = 1;
    cfg.list_max = std::min(3, cfg.pmas);
    cfg.tie_probability = 0.25;
    cfg.alpha = 0.5;
    cfg.seed = seed;
    return cfg;
}

bool stable_by_audit(const StrictMarket& sm, ChoiceKind kind, const Matching& matching,
                     std::string* why) {
    const auto ir = is_individually_rational(sm, kind, matching);
    if (!ir.ok) {
        *why = "not individually rational";
        return false;
    }
    const auto pairs = find_blocking_pairs_serial(sm, kind, matching);
    if (!pairs.empty()) {
        *why = "blocking pair (" + pairs.front().candidate + ", " + pairs.front().pma + ")";
        return false;
    }
    // Cross-check against the independent enumeration.
    if (!oracle::enumerate_blocking_pairs(sm, kind, matching).empty()) {
        *why = "audit/oracle disagreement on blocking pairs";
        return false;
    }
    return true;
}

}  // namespace

SuiteResult verify_fixture_traces() {
    SuiteRunner run("fixture traces");
    const auto market = oracle::fixture(oracle::FixtureId::thm3_strategyproofness);
    const auto sm = apply_tie_breaking(market);
    const auto out = run_da(sm, ChoiceKind::y2018);
    ++run.result.checked;

    const std::map<CandidateId, PmaId> round1_apps{
        {"c", "m3"}, {"d", "m1"}, {"e", "m1"}, {"f", "m3"}, {"g", "m2"}};
    const std::map<PmaId, std::vector<CandidateId>> round1_rej{{"m1", {"e"}}, {"m3", {"c"}}};
    const std::map<PmaId, std::vector<CandidateId>> round2_rej{{"m2", {"e"}}};

    if (out.rounds.size() != 3)
        run.fail("expected 3 rounds, got " + std::to_string(out.rounds.size()));
    else {
        if (out.rounds[0].applications != round1_apps) run.fail("round 1 applications differ");
        if (out.rounds[0].rejections != round1_rej) run.fail("round 1 rejections differ");
        if (out.rounds[1].rejections != round2_rej) run.fail("round 2 rejections differ");
        if (!out.rounds[2].rejections.empty()) run.fail("final round has rejections");
    }

    Matching expected;
    expected.assign("c", "m1");
    expected.assign("d", "m1");
    expected.assign("f", "m3");
    expected.assign("g", "m2");
    if (out.matching != expected) run.fail("truthful matching differs");

    // e's profitable misreport flips the outcome to {c,e} at m1.
    auto misreport = market;
    for (auto& c : misreport.candidates)
        if (c.id == "e") c.preferences = {"m2", "m1"};
    const auto out2 = run_da(apply_tie_breaking(misreport), ChoiceKind::y2018);
    ++run.result.checked;
    Matching expected2;
    expected2.assign("c", "m1");
    expected2.assign("e", "m1");
    expected2.assign("f", "m3");
    expected2.assign("g", "m2");
    if (out2.matching != expected2) run.fail("misreport matching differs");

    return run.finish();
}

SuiteResult verify_no_stable_certificate() {
    SuiteRunner run("no-stable certificate");
    const auto market = oracle::fixture(oracle::FixtureId::thm3_no_stable);
    const auto sm = apply_tie_breaking(market);

    ++run.result.checked;
    if (!oracle::brute_force_stable_matchings(sm, ChoiceKind::y2018).empty())
        run.fail("a stable matching exists under 2018 semantics");

    ++run.result.checked;
    const auto out = run_pipeline(sm, {ChoiceKind::y2018, ParetoMode::candidate_only, 100});
    if (find_blocking_pairs_serial(sm, ChoiceKind::y2018, out.matching).empty())
        run.fail("pipeline output has no blocking pair");

    ++run.result.checked;
    if (oracle::brute_force_stable_matchings(sm, ChoiceKind::prefer_more).empty())
        run.fail("no stable matching under prefer-more despite the chain structure");

    return run.finish();
}

namespace {

SuiteResult run_theorem_suite(const std::string& name, int instances, std::uint64_t seed0,
                              synth::GenMode mode, ChoiceKind kind, Guarantee expected,
                              bool check_properties, int max_candidates) {
    SuiteRunner run(name);
    std::vector<std::string> errors(instances);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < instances; ++i) {
        try {
            const auto cfg = corpus_config(mode, seed0 + static_cast<std::uint64_t>(i),
                                           max_candidates, 3);
            const auto market = synth::generate(cfg);
            if (guarantees(market, kind).guarantee != expected) {
                errors[i] = "structure report does not grant the guarantee";
                continue;
            }
            const auto sm = apply_tie_breaking(market);
            const auto out = run_da(sm, kind, false);
            std::string why;
            if (!stable_by_audit(sm, kind, out.matching, &why)) {
                errors[i] = why;
                continue;
            }
            for (const auto& cand : market.candidates) {
                const auto rep = oracle::check_strategyproofness_exhaustive(
                    market, {kind, ParetoMode::none, 100}, cand.id);
                if (!rep.clean()) {
                    errors[i] = "profitable misreport for " + cand.id;
                    break;
                }
            }
            if (!errors[i].empty()) continue;
            if (check_properties) {
                for (const auto& rep : sm.reports) {
                    const auto props = oracle::check_choice_properties(rep, kind);
                    if (!props.clean()) {
                        errors[i] = "choice property violation (" +
                                    props.violations.front().property + ") at PMA " +
                                    rep.pma();
                        break;
                    }
                }
                if (!errors[i].empty()) continue;
                // Also a full-width universe: a seven-candidate report whose
                // PMA ranks everyone, enumerated over all 128 subsets.
                auto rcfg = cfg;
                rcfg.candidates = 7;
                rcfg.pmas = 1;
                rcfg.pops_min = 1;
                rcfg.pops_max = 4;
                const auto gen = synth::generate_report(rcfg);
                const auto props = oracle::check_choice_properties(gen.strict, kind);
                if (!props.clean())
                    errors[i] = "choice property violation (" +
                                props.violations.front().property +
                                ") on the full-width report";
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }

    run.result.checked = instances;
    for (int i = 0; i < instances; ++i)
        if (!errors[i].empty())
            run.fail("seed " + std::to_string(seed0 + i) + ": " + errors[i]);
    return run.finish();
}

}  // namespace

SuiteResult run_thm1_suite(int instances, std::uint64_t seed0) {
    return run_theorem_suite("laminar disjoint targets (2018 choice)", instances, seed0,
                             synth::GenMode::laminar_disjoint_targets, ChoiceKind::y2018,
                             Guarantee::stable_and_strategyproof_alg1, false, 8);
}

SuiteResult run_thm2_suite(int instances, std::uint64_t seed0) {
    return run_theorem_suite("laminar chain targets (prefer-more choice)", instances, seed0,
                             synth::GenMode::laminar_chain_targets, ChoiceKind::prefer_more,
                             Guarantee::stable_and_strategyproof_alg2, true, 7);
}

SuiteResult run_irc_suite(int reports, std::uint64_t seed0) {
    SuiteRunner run("IRC on arbitrary reports");
    std::vector<std::string> errors(reports);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < reports; ++i) {
        try {
            auto cfg = corpus_config(synth::GenMode::arbitrary_intersecting,
                                     seed0 + static_cast<std::uint64_t>(i), 7, 1);
            cfg.pops_max = 4;
            const auto gen = synth::generate_report(cfg);
            for (auto kind : {ChoiceKind::y2018, ChoiceKind::prefer_more,
                              ChoiceKind::prefer_more_staged}) {
                const auto props = oracle::check_choice_properties(gen.strict, kind);
                if (props.first("irc") != nullptr) {
                    errors[i] = "IRC violation under " + to_string(kind);
                    break;
                }
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    run.result.checked = reports;
    for (int i = 0; i < reports; ++i)
        if (!errors[i].empty())
            run.fail("seed " + std::to_string(seed0 + i) + ": " + errors[i]);
    return run.finish();
}

namespace {

std::set<CandidateId> chosen_set(const StrictReport& rep, ChoiceKind kind,
                                 const std::vector<CandidateId>& input) {
    const auto res = choose(rep, kind, input);
    return {res.chosen.begin(), res.chosen.end()};
}

StrictReport without_targets(const PreferenceReport& report,
                             const std::vector<CandidateId>& order) {
    auto stripped = report;
    for (auto& p : stripped.populations) p.min_target = 0;
    return make_strict_report(stripped, order);
}

}  // namespace

SuiteResult run_equivalence_suite(int reports, std::uint64_t seed0) {
    SuiteRunner run("staged equivalence and coincidence");
    std::vector<std::string> errors(reports);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < reports; ++i) {
        try {
            auto cfg = corpus_config(synth::GenMode::arbitrary_intersecting,
                                     seed0 + static_cast<std::uint64_t>(i), 7, 1);
            cfg.pops_max = 4;
            const auto gen = synth::generate_report(cfg);
            const auto& universe = gen.strict.order();
            const auto stripped = without_targets(gen.report, gen.strict.order());

            auto disjoint_cfg = cfg;
            disjoint_cfg.mode = synth::GenMode::laminar_disjoint_targets;
            const auto disjoint = synth::generate_report(disjoint_cfg);

            const auto n = universe.size();
            for (std::size_t mask = 0; mask < (1u << n) && errors[i].empty(); ++mask) {
                std::vector<CandidateId> subset;
                for (std::size_t b = 0; b < n; ++b)
                    if (mask & (1u << b)) subset.push_back(universe[b]);

                if (chosen_set(gen.strict, ChoiceKind::prefer_more, subset) !=
                    chosen_set(gen.strict, ChoiceKind::prefer_more_staged, subset)) {
                    errors[i] = "prefer-more != staged";
                    break;
                }
                const auto base = chosen_set(stripped, ChoiceKind::y2018, subset);
                for (auto kind : {ChoiceKind::prefer_more, ChoiceKind::prefer_more_staged,
                                  ChoiceKind::y2019})
                    if (chosen_set(stripped, kind, subset) != base) {
                        errors[i] = "kinds disagree with no minimum targets";
                        break;
                    }
            }
            const auto dn = disjoint.strict.order().size();
            for (std::size_t mask = 0; mask < (1u << dn) && errors[i].empty(); ++mask) {
                std::vector<CandidateId> subset;
                for (std::size_t b = 0; b < dn; ++b)
                    if (mask & (1u << b)) subset.push_back(disjoint.strict.order()[b]);
                if (chosen_set(disjoint.strict, ChoiceKind::y2018, subset) !=
                    chosen_set(disjoint.strict, ChoiceKind::prefer_more, subset)) {
                    errors[i] = "2018 != prefer-more despite disjoint targets";
                    break;
                }
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    run.result.checked = reports;
    for (int i = 0; i < reports; ++i)
        if (!errors[i].empty())
            run.fail("seed " + std::to_string(seed0 + i) + ": " + errors[i]);
    return run.finish();
}

namespace {

// The exhaustive three-candidate family: every ordered-sublist profile over
// two PMAs, every ranking and capacity of the first PMA, six population
// patterns keyed to its ranking.
std::vector<Market> three_candidate_family() {
    const std::vector<CandidateId> cands{"a", "b", "c"};
    const std::vector<PmaId> pmas{"X", "Y"};
    std::vector<std::vector<PmaId>> lists{{}, {"X"}, {"Y"}, {"X", "Y"}, {"Y", "X"}};
    std::vector<std::array<int, 3>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                          {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<Market> family;

    for (const auto& la : lists)
        for (const auto& lb : lists)
            for (const auto& lc : lists)
                for (const auto& perm : perms)
                    for (int cap : {1, 2})
                        for (int pattern = 0; pattern < 6; ++pattern) {
                            Market mkt;
                            mkt.tie_break_seed = 1;
                            mkt.candidates = {{"a", la, {}}, {"b", lb, {}}, {"c", lc, {}}};
                            PreferenceReport x;
                            x.pma = "X";
                            x.capacity = cap;
                            const CandidateId top = cands[perm[0]];
                            const CandidateId mid = cands[perm[1]];
                            const CandidateId bot = cands[perm[2]];
                            x.ranking = {{top, 1}, {mid, 2}, {bot, 3}};
                            auto pop = [&](std::string id, std::vector<CandidateId> members,
                                           int tgt, std::optional<int> quota) {
                                RawPopulation p;
                                p.id = std::move(id);
                                p.name = p.id;
                                p.members = std::move(members);
                                std::sort(p.members.begin(), p.members.end());
                                p.min_target = tgt;
                                p.max_quota = quota;
                                x.populations.push_back(std::move(p));
                            };
                            switch (pattern) {
                                case 0: break;
                                case 1: pop("t", {top}, 1, std::nullopt); break;
                                case 2: pop("tm", {top, mid}, 0, 1); break;
                                case 3:
                                    pop("tm", {top, mid}, 1, std::nullopt);
                                    pop("mb", {mid, bot}, 0, 1);
                                    break;
                                case 4:
                                    pop("all", {top, mid, bot}, 1, std::nullopt);
                                    pop("mb", {mid, bot}, 0, 1);
                                    pop("b", {bot}, 1, std::nullopt);
                                    break;
                                case 5:
                                    pop("tm", {top, mid}, 1, 1);
                                    pop("b", {bot}, 1, std::nullopt);
                                    break;
                            }
                            PreferenceReport y;
                            y.pma = "Y";
                            y.capacity = 1;
                            y.ranking = {{"a", 1}, {"b", 2}, {"c", 3}};
                            mkt.reports = {x, y};
                            family.push_back(std::move(mkt));
                        }
    return family;
}

// Sure-thing check against the fixed profile: if the candidate's submitted
// list contains the PMA and the guarantee precondition holds, the outcome is
// that PMA or better on the submitted list.
bool sure_thing_holds_here(const StrictMarket& sm, const PipelineConfig& config,
                           const Matching& outcome, std::string* why) {
    for (const auto& cand : sm.market.candidates) {
        for (const auto& m : cand.preferences) {
            const auto* rep = sm.find_report(m);
            if (rep == nullptr || !rep->ranks(cand.id)) continue;
            std::vector<CandidateId> others;
            for (const auto& r : rep->order())
                if (r != cand.id) others.push_back(r);
            if (others.size() > 10) continue;
            bool guaranteed = true;
            for (std::size_t mask = 0; mask < (1u << others.size()) && guaranteed; ++mask) {
                std::vector<CandidateId> subset{cand.id};
                for (std::size_t b = 0; b < others.size(); ++b)
                    if (mask & (1u << b)) subset.push_back(others[b]);
                guaranteed = choose(*rep, config.kind, subset).contains(cand.id);
            }
            if (!guaranteed) continue;
            const auto got = outcome.pma_of(cand.id);
            const auto mpos = sm.preference_position(cand.id, m);
            const bool ok = got && sm.preference_position(cand.id, *got) <= mpos;
            if (!ok) {
                *why = "sure-thing broken for " + cand.id + " at " + m;
                return false;
            }
        }
    }
    return true;
}

}  // namespace

SuiteResult run_thm4_exhaustive_suite() {
    SuiteRunner run("truncation and sure-thing, exhaustive three-candidate family");
    const auto family = three_candidate_family();
    std::vector<std::string> errors(family.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (std::size_t i = 0; i < family.size(); ++i) {
        try {
            const auto& market = family[i];
            for (auto kind : {ChoiceKind::y2018, ChoiceKind::prefer_more}) {
                const auto trunc =
                    oracle::check_truncation_safety(market, {kind, ParetoMode::none, 100});
                if (!trunc.clean()) {
                    errors[i] = "truncation violation under pure DA (" + to_string(kind) + ")";
                    break;
                }
                const PipelineConfig full{kind, ParetoMode::alternate, 20};
                const auto sm = apply_tie_breaking(market);
                const auto out = run_pipeline(sm, full);
                std::string why;
                if (!sure_thing_holds_here(sm, full, out.matching, &why)) {
                    errors[i] = why + " (" + to_string(kind) + ")";
                    break;
                }
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    run.result.checked = static_cast<int>(family.size());
    for (std::size_t i = 0; i < family.size(); ++i)
        if (!errors[i].empty()) run.fail("family index " + std::to_string(i) + ": " + errors[i]);
    return run.finish();
}

SuiteResult run_thm4_sampled_suite(int instances, std::uint64_t seed0) {
    SuiteRunner run("truncation and sure-thing, sampled profiles");
    std::vector<std::string> errors(instances);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < instances; ++i) {
        try {
            const auto cfg = corpus_config(synth::GenMode::arbitrary_intersecting,
                                           seed0 + static_cast<std::uint64_t>(i), 8, 3);
            const auto market = synth::generate(cfg);
            const auto kind = (i % 2 == 0) ? ChoiceKind::y2018 : ChoiceKind::prefer_more;

            const auto trunc =
                oracle::check_truncation_safety(market, {kind, ParetoMode::none, 100});
            if (!trunc.clean()) {
                errors[i] = "truncation violation under pure DA";
                continue;
            }

            const PipelineConfig full{kind, ParetoMode::alternate, 20};
            for (const auto& cand : market.candidates) {
                for (const auto& m : cand.preferences) {
                    const auto rep =
                        oracle::check_sure_thing(market, full, cand.id, m, 10, 4);
                    if (rep.applicable && !rep.clean()) {
                        errors[i] = "sure-thing broken for " + cand.id + " at " + m;
                        break;
                    }
                }
                if (!errors[i].empty()) break;
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    run.result.checked = instances;
    for (int i = 0; i < instances; ++i)
        if (!errors[i].empty())
            run.fail("seed " + std::to_string(seed0 + i) + ": " + errors[i]);
    return run.finish();
}

SuiteResult run_pareto_contract_suite(int instances, std::uint64_t seed0) {
    SuiteRunner run("Pareto stage contracts");
    std::vector<std::string> errors(instances);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < instances; ++i) {
        try {
            const auto mode = std::array{synth::GenMode::laminar_disjoint_targets,
                                         synth::GenMode::laminar_chain_targets,
                                         synth::GenMode::arbitrary_intersecting}[i % 3];
            const auto kind = (i % 2 == 0) ? ChoiceKind::y2018 : ChoiceKind::prefer_more;
            const auto market =
                synth::generate(corpus_config(mode, seed0 + static_cast<std::uint64_t>(i), 8, 3));
            const auto sm = apply_tie_breaking(market);
            const auto da = run_da(sm, kind, false);

            const auto c_stage = candidate_pareto_stage(sm, kind, da.matching);
            for (const auto& cand : market.candidates) {
                const auto before = da.matching.pma_of(cand.id);
                const auto after = c_stage.matching.pma_of(cand.id);
                const auto bpos = before ? sm.preference_position(cand.id, *before)
                                         : StrictMarket::npos;
                const auto apos =
                    after ? sm.preference_position(cand.id, *after) : StrictMarket::npos;
                if (apos > bpos) {
                    errors[i] = "candidate stage harmed " + cand.id;
                    break;
                }
            }
            if (!errors[i].empty()) continue;
            if (!find_free_slot_blocking_pairs(sm, kind, c_stage.matching).empty()) {
                errors[i] = "free-slot blocking pair survived the candidate stage";
                continue;
            }

            const auto p_stage = pma_pareto_stage(sm, kind, c_stage.matching);
            for (const auto& res : p_stage.resolutions) {
                const auto& displaced = *res.displaced;
                const auto pos = sm.preference_position(displaced, res.pma);
                const auto& prefs =
                    sm.market.candidates[sm.candidate_index.at(displaced)].preferences;
                for (std::size_t k = pos + 1; k < prefs.size(); ++k) {
                    const auto* lower = sm.find_report(prefs[k]);
                    if (lower != nullptr && lower->ranks(displaced)) {
                        errors[i] = "pma stage displaced " + displaced +
                                    " who still had options";
                        break;
                    }
                }
                if (!errors[i].empty()) break;
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    run.result.checked = instances;
    for (int i = 0; i < instances; ++i)
        if (!errors[i].empty())
            run.fail("seed " + std::to_string(seed0 + i) + ": " + errors[i]);
    return run.finish();
}

TruncationSearch search_truncation_violation(double budget_seconds, std::uint64_t seed0) {
    TruncationSearch out;
    const auto start = Clock::now();
    for (std::uint64_t s = seed0; seconds_since(start) < budget_seconds; ++s) {
        ++out.markets_tried;
        auto cfg = corpus_config(synth::GenMode::arbitrary_intersecting, s, 7, 3);
        cfg.pops_max = 3;
        cfg.list_max = 3;
        const auto market = synth::generate(cfg);
        const auto kind = (s % 2 == 0) ? ChoiceKind::y2018 : ChoiceKind::prefer_more;
        const auto rep = oracle::check_truncation_safety(
            market, {kind, ParetoMode::candidate_only, 100});
        if (!rep.clean()) {
            out.found = true;
            out.seed = s;
            out.candidate = rep.violations.front().candidate;
            out.prefix_length = rep.violations.front().prefix_length;
            break;
        }
    }
    out.seconds = seconds_since(start);
    return out;
}

std::vector<SuiteResult> run_all(const VerifyOptions& options, TruncationSearch* search_out) {
    std::vector<SuiteResult> results;
    results.push_back(verify_fixture_traces());
    results.push_back(verify_no_stable_certificate());
    results.push_back(run_thm1_suite(options.thm1_instances, options.seed));
    results.push_back(run_thm2_suite(options.thm2_instances, options.seed + 1000000));
    results.push_back(run_irc_suite(options.irc_reports, options.seed + 2000000));
    results.push_back(run_equivalence_suite(options.equivalence_reports, options.seed + 3000000));
    results.push_back(run_thm4_exhaustive_suite());
    results.push_back(run_thm4_sampled_suite(options.thm4_sampled, options.seed + 4000000));
    results.push_back(run_pareto_contract_suite(options.pareto_instances, options.seed + 5000000));
    if (search_out != nullptr)
        *search_out =
            search_truncation_violation(options.truncation_search_seconds, options.seed);
    return results;
}

}  // namespace popmatch::verify
