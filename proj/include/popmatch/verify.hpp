#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popmatch/engine.hpp"
#include "popmatch/market.hpp"

namespace popmatch::verify {

struct SuiteResult {
    std::string name;
    bool passed = false;
    int checked = 0;
    int failures = 0;
    double seconds = 0.0;
    std::string detail;
};

// Pins the strategyproofness fixture to its exact round-by-round trace
// (truthful run and the profitable misreport).
SuiteResult verify_fixture_traces();

// thm3_no_stable has zero stable matchings under 2018 semantics, and the DA
// pipeline output on it has at least one audited blocking pair.
SuiteResult verify_no_stable_certificate();

// Laminar populations with pairwise-disjoint minimum targets, 2018 choice,
// pure DA: stable and clean under exhaustive misreport enumeration.
SuiteResult run_thm1_suite(int instances, std::uint64_t seed0);

// Laminar populations, disjoint-chain minimum targets, prefer-more choice:
// stable, strategyproof, and clean choice properties on full subset
// enumeration (substitutability / IRC / LAD / one-removal).
SuiteResult run_thm2_suite(int instances, std::uint64_t seed0);

// IRC holds on arbitrary-structure reports for 2018 / prefer-more / staged.
SuiteResult run_irc_suite(int reports, std::uint64_t seed0);

// prefer_more == prefer_more_staged on every subset; with no minimum targets
// all four kinds agree; with pairwise-disjoint minimum targets 2018 agrees
// with prefer-more.
SuiteResult run_equivalence_suite(int reports, std::uint64_t seed0);

// Truncation safety (pure DA) and sure-thing (full pipeline, both Pareto
// stages) over an exhaustive three-candidate market family.
SuiteResult run_thm4_exhaustive_suite();

// Same properties over sampled larger markets.
SuiteResult run_thm4_sampled_suite(int instances, std::uint64_t seed0);

// Candidate stage: no free-slot blocking pair survives, every candidate
// weakly improves. PMA stage: every displaced candidate had zero acceptable
// options below the displacing PMA.
SuiteResult run_pareto_contract_suite(int instances, std::uint64_t seed0);

struct TruncationSearch {
    bool found = false;
    std::uint64_t seed = 0;
    CandidateId candidate;
    int prefix_length = 0;
    int markets_tried = 0;
    double seconds = 0.0;
};

// Randomized search for a truncation violation under the candidate-Pareto
// stage. Inconclusive (not found in budget) is a valid outcome.
TruncationSearch search_truncation_violation(double budget_seconds, std::uint64_t seed0);

struct VerifyOptions {
    int thm1_instances = 1000;
    int thm2_instances = 1000;
    int irc_reports = 500;
    int equivalence_reports = 1000;
    int thm4_sampled = 1000;
    int pareto_instances = 1000;
    std::uint64_t seed = 20180101;
    double truncation_search_seconds = 60.0;
};

// The full gate. Every SuiteResult must pass; the truncation search is
// reported but cannot fail the gate.
std::vector<SuiteResult> run_all(const VerifyOptions& options,
                                 TruncationSearch* search_out = nullptr);

}  // namespace popmatch::verify
