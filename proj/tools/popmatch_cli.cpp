// Command-line surface: match / audit / check / gen / compare / verify.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "popmatch/audit.hpp"
#include "popmatch/engine.hpp"
#include "popmatch/io.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/structure.hpp"
#include "popmatch/synth.hpp"
#include "popmatch/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace popmatch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;

struct CommonFlags {
    std::string input;
    std::string out_dir;
    std::string choice = "2018";
    std::string pareto = "candidate";
    int alternation_cap = 100;
    std::int64_t seed = -1;  // -1: use the market's seed
};

fs::path resolve_out(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("POPMATCH_OUT")) return env;
    return "out";
}

Market load_checked(const CommonFlags& flags, ChoiceKind kind) {
    auto market = io::load_market(flags.input);
    if (flags.seed >= 0) market.tie_break_seed = static_cast<std::uint64_t>(flags.seed);
    const auto report = validate(market, kind);
    if (!report.ok()) {
        std::cerr << "validation failed (" << report.violations.size() << " violations):\n";
        for (const auto& v : report.violations)
            std::cerr << "  [" << v.code << "] " << v.message << "\n";
        std::exit(kExitValidation);
    }
    return market;
}

void write_audit_artifacts(const StrictMarket& sm, ChoiceKind kind, const Matching& matching,
                           const fs::path& out, io::RunManifest& manifest) {
    const auto ir = is_individually_rational(sm, kind, matching);
    const auto pairs = find_blocking_pairs(sm, kind, matching);
    io::save_audit_json(ir, pairs, out / "audit.json");
    io::save_explanations_csv(explain_all(sm, kind, matching), out / "explanations.csv");
    io::save_summary_json(summarize(sm, matching, pairs), out / "summary.json");
    manifest.outputs.push_back((out / "audit.json").string());
    manifest.outputs.push_back((out / "explanations.csv").string());
    manifest.outputs.push_back((out / "summary.json").string());
}

int cmd_match(const CommonFlags& flags) {
    const auto kind = choice_kind_from_string(flags.choice);
    const auto market = load_checked(flags, kind);
    const auto out = resolve_out(flags.out_dir);
    fs::create_directories(out);

    PipelineConfig config{kind, pareto_mode_from_string(flags.pareto), flags.alternation_cap};
    const auto sm = apply_tie_breaking(market);
    const auto outcome = run_pipeline(sm, config);

    io::RunManifest manifest;
    manifest.command = "match";
    manifest.input = flags.input;
    manifest.flags = {{"choice", flags.choice},
                      {"pareto", flags.pareto},
                      {"alternation_cap", std::to_string(flags.alternation_cap)}};
    manifest.seed = market.tie_break_seed;

    io::save_matching_json(outcome.matching, market, out / "matching.json");
    io::save_outcome_json(outcome, market, out / "outcome.json");
    manifest.outputs.push_back((out / "matching.json").string());
    manifest.outputs.push_back((out / "outcome.json").string());
    write_audit_artifacts(sm, kind, outcome.matching, out, manifest);
    io::save_structure_json(guarantees(market, kind), out / "structure.json");
    manifest.outputs.push_back((out / "structure.json").string());
    io::save_manifest_json(manifest, out / "manifest.json");

    if (outcome.alternation_cap_hit)
        std::cerr << "warning: alternation cap hit before a fixpoint\n";
    std::cout << "matched " << outcome.matching.size() << " candidates in "
              << outcome.rounds.size() << " rounds; artifacts in " << out.string() << "\n";
    return kExitOk;
}

int cmd_audit(const CommonFlags& flags, const std::string& matching_path) {
    const auto kind = choice_kind_from_string(flags.choice);
    const auto market = load_checked(flags, kind);
    const auto matching = io::load_matching_json(matching_path);
    const auto out = resolve_out(flags.out_dir);
    fs::create_directories(out);
    const auto sm = apply_tie_breaking(market);

    io::RunManifest manifest;
    manifest.command = "audit";
    manifest.input = flags.input;
    manifest.flags = {{"choice", flags.choice}, {"matching", matching_path}};
    manifest.seed = market.tie_break_seed;
    write_audit_artifacts(sm, kind, matching, out, manifest);
    io::save_manifest_json(manifest, out / "manifest.json");

    const auto pairs = find_blocking_pairs(sm, kind, matching);
    std::cout << pairs.size() << " blocking pairs; artifacts in " << out.string() << "\n";
    return kExitOk;
}

int cmd_check(const CommonFlags& flags) {
    const auto kind = choice_kind_from_string(flags.choice);
    const auto market = load_checked(flags, kind);
    const auto report = guarantees(market, kind);

    for (const auto& p : report.pmas) {
        std::cout << p.pma << ": laminar=" << (p.laminar ? "yes" : "no")
                  << " disjoint-targets=" << (p.min_targets_pairwise_disjoint ? "yes" : "no")
                  << " chain-targets=" << (p.min_targets_disjoint_chains ? "yes" : "no")
                  << "\n";
    }
    std::cout << "market guarantee under " << to_string(kind) << ": "
              << to_string(report.guarantee) << "\n";

    if (!flags.out_dir.empty()) {
        const auto out = resolve_out(flags.out_dir);
        fs::create_directories(out);
        io::save_structure_json(report, out / "structure.json");
        io::RunManifest manifest;
        manifest.command = "check";
        manifest.input = flags.input;
        manifest.flags = {{"choice", flags.choice}};
        manifest.seed = market.tie_break_seed;
        manifest.outputs.push_back((out / "structure.json").string());
        io::save_manifest_json(manifest, out / "manifest.json");
    }
    return kExitOk;
}

int cmd_gen(const synth::GenConfig& cfg, const std::string& out_path, bool as_csv) {
    const auto market = synth::generate(cfg);
    if (as_csv)
        io::save_market_csv(market, out_path);
    else
        io::save_market_json(market, out_path);
    std::cout << "generated market: " << market.candidates.size() << " candidates, "
              << market.reports.size() << " pmas -> " << out_path << "\n";
    return kExitOk;
}

struct CompareRow {
    std::uint64_t seed = 0;
    int da_blocking = 0;
    int da_real = 0;
    int da_matched = 0;
    bool da_ir = true;
    int boston_blocking = 0;
    int boston_real = 0;
    int boston_matched = 0;
    bool boston_ir = true;
};

CompareRow compare_one(const Market& market, const PipelineConfig& config) {
    CompareRow row;
    row.seed = market.tie_break_seed;
    const auto sm = apply_tie_breaking(market);

    const auto da = run_pipeline(sm, config);
    const auto da_pairs = find_blocking_pairs(sm, config.kind, da.matching);
    row.da_blocking = static_cast<int>(da_pairs.size());
    for (const auto& p : da_pairs)
        if (p.classification == BlockingClass::real) ++row.da_real;
    row.da_matched = static_cast<int>(da.matching.size());
    row.da_ir = is_individually_rational(sm, config.kind, da.matching).ok;

    const auto boston = run_boston(sm, config.kind);
    const auto b_pairs = find_blocking_pairs(sm, config.kind, boston);
    row.boston_blocking = static_cast<int>(b_pairs.size());
    for (const auto& p : b_pairs)
        if (p.classification == BlockingClass::real) ++row.boston_real;
    row.boston_matched = static_cast<int>(boston.size());
    row.boston_ir = is_individually_rational(sm, config.kind, boston).ok;
    return row;
}

int cmd_compare(const CommonFlags& flags, int corpus, const std::string& gen_mode,
                int gen_candidates, int gen_pmas, std::uint64_t gen_seed) {
    const auto kind = choice_kind_from_string(flags.choice);
    PipelineConfig config{kind, pareto_mode_from_string(flags.pareto), flags.alternation_cap};
    const auto out = resolve_out(flags.out_dir);
    fs::create_directories(out);

    std::vector<CompareRow> rows;
    if (!flags.input.empty()) {
        rows.push_back(compare_one(load_checked(flags, kind), config));
    } else {
        for (int i = 0; i < corpus; ++i) {
            synth::GenConfig cfg;
            cfg.mode = synth::gen_mode_from_string(gen_mode);
            cfg.candidates = gen_candidates;
            cfg.pmas = gen_pmas;
            cfg.pops_min = 1;
            cfg.pops_max = 3;
            cfg.list_min = 1;
            cfg.list_max = std::min(3, gen_pmas);
            cfg.seed = gen_seed + static_cast<std::uint64_t>(i);
            rows.push_back(compare_one(synth::generate(cfg), config));
        }
    }

    json j;
    j["schema_version"] = 1;
    json markets = json::array();
    int boston_ge_da = 0, da_stable = 0;
    double da_mean = 0, boston_mean = 0;
    for (const auto& r : rows) {
        markets.push_back({{"seed", r.seed},
                           {"da_blocking", r.da_blocking},
                           {"da_real_blocking", r.da_real},
                           {"da_matched", r.da_matched},
                           {"da_individually_rational", r.da_ir},
                           {"boston_blocking", r.boston_blocking},
                           {"boston_real_blocking", r.boston_real},
                           {"boston_matched", r.boston_matched},
                           {"boston_individually_rational", r.boston_ir}});
        boston_ge_da += r.boston_blocking >= r.da_blocking ? 1 : 0;
        da_stable += r.da_blocking == 0 ? 1 : 0;
        da_mean += r.da_blocking;
        boston_mean += r.boston_blocking;
    }
    const auto n = static_cast<double>(rows.size());
    j["markets"] = std::move(markets);
    j["summary"] = {{"instances", rows.size()},
                    {"da_blocking_mean", n > 0 ? da_mean / n : 0.0},
                    {"boston_blocking_mean", n > 0 ? boston_mean / n : 0.0},
                    {"da_stable_fraction", n > 0 ? da_stable / n : 0.0},
                    {"boston_ge_da_fraction", n > 0 ? boston_ge_da / n : 0.0}};
    std::ofstream f(out / "compare.json");
    f << j.dump(2) << "\n";

    std::cout << "instances: " << rows.size() << "\n"
              << "mean blocking pairs:   DA " << (n > 0 ? da_mean / n : 0.0) << "  Boston "
              << (n > 0 ? boston_mean / n : 0.0) << "\n"
              << "DA stable fraction:    " << (n > 0 ? da_stable / n : 0.0) << "\n"
              << "Boston >= DA fraction: " << (n > 0 ? boston_ge_da / n : 0.0) << "\n"
              << "table: " << (out / "compare.json").string() << "\n";
    return kExitOk;
}

int cmd_verify(const verify::VerifyOptions& options, bool with_search,
               const std::string& out_dir) {
    verify::TruncationSearch search;
    const auto results = verify::run_all(options, with_search ? &search : nullptr);
    bool all_passed = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.checked
                  << " checks, " << r.failures << " failures, " << r.seconds << " s)";
        if (!r.passed) std::cout << " :: " << r.detail;
        std::cout << "\n";
        all_passed = all_passed && r.passed;
    }
    if (with_search) {
        if (search.found)
            std::cout << "[INFO] truncation violation exhibited with candidate stage: seed "
                      << search.seed << ", candidate " << search.candidate << ", prefix "
                      << search.prefix_length << " (" << search.markets_tried
                      << " markets, " << search.seconds << " s)\n";
        else
            std::cout << "[INFO] truncation-violation search inconclusive after "
                      << search.markets_tried << " markets (" << search.seconds << " s)\n";
    }
    if (!out_dir.empty()) {
        const auto out = resolve_out(out_dir);
        fs::create_directories(out);
        json j;
        j["schema_version"] = 1;
        j["tool_version"] = kToolVersion;
        j["passed"] = all_passed;
        json suites = json::array();
        for (const auto& r : results)
            suites.push_back({{"name", r.name},
                              {"passed", r.passed},
                              {"checked", r.checked},
                              {"failures", r.failures},
                              {"seconds", r.seconds},
                              {"detail", r.detail}});
        j["suites"] = std::move(suites);
        if (with_search)
            j["truncation_search"] = {{"found", search.found},
                                      {"seed", search.seed},
                                      {"candidate", search.candidate},
                                      {"prefix_length", search.prefix_length},
                                      {"markets_tried", search.markets_tried},
                                      {"seconds", search.seconds}};
        std::ofstream f(out / "verify.json");
        f << j.dump(2) << "\n";
        std::cout << "report: " << (out / "verify.json").string() << "\n";
    }
    return all_passed ? kExitOk : kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diversity-aware matching engine"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CommonFlags flags;
    const auto add_common = [&](CLI::App* cmd, bool needs_input) {
        auto* in = cmd->add_option("--in", flags.input, "market file (.json) or CSV directory");
        if (needs_input) in->required();
        cmd->add_option("--out", flags.out_dir, "output directory (or $POPMATCH_OUT)");
        cmd->add_option("--choice", flags.choice,
                        "choice semantics: 2018 | prefer-more | prefer-more-staged | 2019");
        cmd->add_option("--seed", flags.seed, "override the market's tie-break seed");
    };

    auto* match = app.add_subcommand("match", "run the matching pipeline");
    add_common(match, true);
    match->add_option("--pareto", flags.pareto, "none | candidate | alternate");
    match->add_option("--alternation-cap", flags.alternation_cap, "max full alternations");

    std::string matching_path;
    auto* audit = app.add_subcommand("audit", "audit an existing matching");
    add_common(audit, true);
    audit->add_option("--matching", matching_path, "matching.json to audit")->required();

    auto* check = app.add_subcommand("check", "structure report and guarantees");
    add_common(check, true);

    synth::GenConfig gen_cfg;
    std::string gen_out = "market.json";
    std::string gen_mode = "arbitrary";
    std::string gen_config_path;
    bool gen_csv = false;
    auto* gen = app.add_subcommand("gen", "generate a synthetic market");
    gen->add_option("--config", gen_config_path, "generator config JSON");
    gen->add_option("--candidates", gen_cfg.candidates);
    gen->add_option("--pmas", gen_cfg.pmas);
    gen->add_option("--slots-min", gen_cfg.slots_min);
    gen->add_option("--slots-max", gen_cfg.slots_max);
    int gen_total_slots = -1;
    gen->add_option("--total-slots", gen_total_slots, "exact total capacity");
    gen->add_option("--mode", gen_mode, "laminar-disjoint | laminar-chain | arbitrary");
    gen->add_option("--pops-min", gen_cfg.pops_min);
    gen->add_option("--pops-max", gen_cfg.pops_max);
    gen->add_option("--list-min", gen_cfg.list_min);
    gen->add_option("--list-max", gen_cfg.list_max);
    gen->add_option("--alpha", gen_cfg.alpha);
    gen->add_option("--tie-probability", gen_cfg.tie_probability);
    gen->add_option("--gen-seed", gen_cfg.seed);
    gen->add_option("--out", gen_out, "output market path");
    gen->add_flag("--csv", gen_csv, "emit the CSV directory format");

    int corpus = 0;
    std::string cmp_gen_mode = "arbitrary";
    int cmp_candidates = 8;
    int cmp_pmas = 3;
    std::uint64_t cmp_seed = 1;
    auto* compare = app.add_subcommand("compare", "DA pipeline vs Boston baseline");
    add_common(compare, false);
    compare->add_option("--pareto", flags.pareto, "none | candidate | alternate");
    compare->add_option("--corpus", corpus, "number of generated markets");
    compare->add_option("--gen-mode", cmp_gen_mode);
    compare->add_option("--gen-candidates", cmp_candidates);
    compare->add_option("--gen-pmas", cmp_pmas);
    compare->add_option("--gen-seed", cmp_seed);

    verify::VerifyOptions vopts;
    bool fast = false;
    bool no_search = false;
    std::string verify_out;
    auto* verify_cmd = app.add_subcommand("verify", "run the full oracle suite");
    verify_cmd->add_option("--out", verify_out, "directory for verify.json");
    verify_cmd->add_option("--thm1", vopts.thm1_instances);
    verify_cmd->add_option("--thm2", vopts.thm2_instances);
    verify_cmd->add_option("--irc", vopts.irc_reports);
    verify_cmd->add_option("--equivalence", vopts.equivalence_reports);
    verify_cmd->add_option("--thm4-sampled", vopts.thm4_sampled);
    verify_cmd->add_option("--pareto-checks", vopts.pareto_instances);
    verify_cmd->add_option("--suite-seed", vopts.seed);
    verify_cmd->add_option("--search-seconds", vopts.truncation_search_seconds);
    verify_cmd->add_flag("--fast", fast, "small instance counts for smoke runs");
    verify_cmd->add_flag("--no-search", no_search, "skip the truncation-violation search");

    CLI11_PARSE(app, argc, argv);

    try {
        if (match->parsed()) return cmd_match(flags);
        if (audit->parsed()) return cmd_audit(flags, matching_path);
        if (check->parsed()) return cmd_check(flags);
        if (gen->parsed()) {
            if (!gen_config_path.empty()) gen_cfg = io::load_gen_config_json(gen_config_path);
            else gen_cfg.mode = synth::gen_mode_from_string(gen_mode);
            if (gen_total_slots >= 0) gen_cfg.total_slots = gen_total_slots;
            return cmd_gen(gen_cfg, gen_out, gen_csv);
        }
        if (compare->parsed())
            return cmd_compare(flags, corpus, cmp_gen_mode, cmp_candidates, cmp_pmas, cmp_seed);
        if (verify_cmd->parsed()) {
            if (fast) {
                vopts.thm1_instances = 50;
                vopts.thm2_instances = 50;
                vopts.irc_reports = 25;
                vopts.equivalence_reports = 50;
                vopts.thm4_sampled = 50;
                vopts.pareto_instances = 50;
                vopts.truncation_search_seconds = 10.0;
            }
            return cmd_verify(vopts, !no_search, verify_out);
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const GenerationError& e) {
        std::cerr << "generation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
