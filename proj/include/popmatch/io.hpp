#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "popmatch/audit.hpp"
#include "popmatch/engine.hpp"
#include "popmatch/market.hpp"
#include "popmatch/structure.hpp"
#include "popmatch/synth.hpp"

namespace popmatch::io {

// Canonical market JSON: top-level keys candidates / pmas / tie_break_seed.
Market load_market_json(const std::filesystem::path& path);
void save_market_json(const Market& market, const std::filesystem::path& path);
Market market_from_json_text(const std::string& text);
std::string market_to_json_text(const Market& market);

// CSV mirror of the spreadsheet format: market.csv, pmas.csv,
// preferences.csv, attributes.csv, plus per-PMA populations and candidates
// tables. Round-trips losslessly against the JSON form.
Market load_market_csv(const std::filesystem::path& dir);
void save_market_csv(const Market& market, const std::filesystem::path& dir);

// Loads either format: .json file or a directory of CSVs.
Market load_market(const std::filesystem::path& path);

Matching load_matching_json(const std::filesystem::path& path);
void save_matching_json(const Matching& matching, const Market& market,
                        const std::filesystem::path& path);

void save_outcome_json(const MatchOutcome& outcome, const Market& market,
                       const std::filesystem::path& path);

void save_audit_json(const IrReport& ir, const std::vector<BlockingPair>& pairs,
                     const std::filesystem::path& path);

void save_explanations_csv(const std::vector<Explanation>& explanations,
                           const std::filesystem::path& path);

void save_summary_json(const OutcomeStats& stats, const std::filesystem::path& path);

void save_structure_json(const StructureReport& report, const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    std::string input;
    std::vector<std::pair<std::string, std::string>> flags;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
};

void save_manifest_json(const RunManifest& manifest, const std::filesystem::path& path);

synth::GenConfig load_gen_config_json(const std::filesystem::path& path);

// Minimal RFC-4180 CSV helpers (quoting for commas, quotes, newlines).
std::string csv_escape(const std::string& field);
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace popmatch::io
