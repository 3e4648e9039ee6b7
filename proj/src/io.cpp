#include "popmatch/io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace popmatch::io {

using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

void write_json(const json& j, const std::filesystem::path& path) {
    write_file(path, j.dump(2) + "\n");
}

json parse(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw IoError("malformed JSON in " + what);
    return j;
}

json population_to_json(const RawPopulation& p) {
    json j;
    j["id"] = p.id;
    j["name"] = p.name;
    j["kind"] = p.kind == PopulationKind::binary ? "binary" : "multi_valued";
    j["min_target"] = p.min_target;
    if (p.max_quota)
        j["max_quota"] = *p.max_quota;
    else
        j["max_quota"] = nullptr;
    j["is_gender"] = p.is_gender;
    if (p.kind == PopulationKind::binary) {
        j["members"] = p.members;
    } else {
        json values = json::object();
        for (const auto& [c, v] : p.values) values[c] = v;
        j["values"] = std::move(values);
        json overrides = json::object();
        for (const auto& [v, q] : p.overrides) overrides[v] = q;
        j["overrides"] = std::move(overrides);
    }
    return j;
}

RawPopulation population_from_json(const json& j) {
    RawPopulation p;
    p.id = j.at("id").get<std::string>();
    p.name = j.value("name", p.id);
    const auto kind = j.value("kind", std::string("binary"));
    if (kind == "binary")
        p.kind = PopulationKind::binary;
    else if (kind == "multi_valued")
        p.kind = PopulationKind::multi_valued;
    else
        throw IoError("unknown population kind: " + kind);
    p.min_target = j.value("min_target", 0);
    if (j.contains("max_quota") && !j.at("max_quota").is_null())
        p.max_quota = j.at("max_quota").get<int>();
    p.is_gender = j.value("is_gender", false);
    if (p.kind == PopulationKind::binary) {
        for (const auto& m : j.value("members", json::array()))
            p.members.push_back(m.get<std::string>());
    } else {
        if (j.contains("values"))
            for (const auto& [c, v] : j.at("values").items())
                p.values[c] = v.get<std::string>();
        if (j.contains("overrides"))
            for (const auto& [v, q] : j.at("overrides").items())
                p.overrides[v] = q.get<int>();
    }
    return p;
}

}  // namespace

std::string market_to_json_text(const Market& market) {
    json j;
    j["schema_version"] = 1;
    j["tie_break_seed"] = market.tie_break_seed;
    json candidates = json::array();
    for (const auto& c : market.candidates) {
        json cj;
        cj["id"] = c.id;
        cj["preferences"] = c.preferences;
        if (!c.attributes.empty()) {
            json attrs = json::object();
            for (const auto& [k, v] : c.attributes) attrs[k] = v;
            cj["attributes"] = std::move(attrs);
        }
        candidates.push_back(std::move(cj));
    }
    j["candidates"] = std::move(candidates);
    json pmas = json::array();
    for (const auto& r : market.reports) {
        json pj;
        pj["id"] = r.pma;
        pj["capacity"] = r.capacity;
        json ranking = json::object();
        for (const auto& [c, rank] : r.ranking) ranking[c] = rank;
        pj["ranking"] = std::move(ranking);
        json pops = json::array();
        for (const auto& p : r.populations) pops.push_back(population_to_json(p));
        pj["populations"] = std::move(pops);
        pmas.push_back(std::move(pj));
    }
    j["pmas"] = std::move(pmas);
    return j.dump(2) + "\n";
}

Market market_from_json_text(const std::string& text) {
    const json j = parse(text, "market");
    Market mkt;
    mkt.tie_break_seed = j.value("tie_break_seed", 0ull);
    for (const auto& cj : j.value("candidates", json::array())) {
        Candidate c;
        c.id = cj.at("id").get<std::string>();
        for (const auto& p : cj.value("preferences", json::array()))
            c.preferences.push_back(p.get<std::string>());
        if (cj.contains("attributes"))
            for (const auto& [k, v] : cj.at("attributes").items())
                c.attributes[k] = v.get<std::string>();
        mkt.candidates.push_back(std::move(c));
    }
    for (const auto& pj : j.value("pmas", json::array())) {
        PreferenceReport r;
        r.pma = pj.at("id").get<std::string>();
        r.capacity = pj.at("capacity").get<int>();
        if (pj.contains("ranking"))
            for (const auto& [c, rank] : pj.at("ranking").items())
                r.ranking[c] = rank.get<int>();
        for (const auto& pop : pj.value("populations", json::array()))
            r.populations.push_back(population_from_json(pop));
        mkt.reports.push_back(std::move(r));
    }
    return mkt;
}

Market load_market_json(const std::filesystem::path& path) {
    return market_from_json_text(read_file(path));
}

void save_market_json(const Market& market, const std::filesystem::path& path) {
    write_file(path, market_to_json_text(market));
}

// --- CSV -------------------------------------------------------------------

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                any = false;
            }
        } else {
            field += ch;
            any = true;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(fields[i]);
    }
    out += '\n';
    return out;
}

std::string safe_name(const std::string& id) {
    std::string out;
    for (char ch : id)
        out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_')
                   ? ch
                   : '_';
    return out;
}

std::string pack_overrides(const std::map<std::string, int>& overrides) {
    std::string out;
    for (const auto& [v, q] : overrides) {
        if (!out.empty()) out += ';';
        out += v + "=" + std::to_string(q);
    }
    return out;
}

std::map<std::string, int> unpack_overrides(const std::string& packed) {
    std::map<std::string, int> out;
    std::string token;
    std::istringstream ss(packed);
    while (std::getline(ss, token, ';')) {
        const auto eq = token.rfind('=');
        if (eq == std::string::npos) throw IoError("malformed override: " + token);
        out[token.substr(0, eq)] = std::stoi(token.substr(eq + 1));
    }
    return out;
}

}  // namespace

void save_market_csv(const Market& market, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "market.csv",
               csv_row({"key", "value"}) + csv_row({"schema_version", "1"}) +
                   csv_row({"tie_break_seed", std::to_string(market.tie_break_seed)}));

    std::string candidates = csv_row({"candidate_id"});
    std::string preferences = csv_row({"candidate_id", "position", "pma_id"});
    std::string attributes = csv_row({"candidate_id", "attribute", "value"});
    bool any_attr = false;
    for (const auto& c : market.candidates) {
        candidates += csv_row({c.id});
        for (std::size_t k = 0; k < c.preferences.size(); ++k)
            preferences += csv_row({c.id, std::to_string(k), c.preferences[k]});
        for (const auto& [a, v] : c.attributes) {
            attributes += csv_row({c.id, a, v});
            any_attr = true;
        }
    }
    write_file(dir / "candidates.csv", candidates);
    write_file(dir / "preferences.csv", preferences);
    if (any_attr) write_file(dir / "attributes.csv", attributes);

    std::string pmas = csv_row({"pma_id", "capacity"});
    std::set<std::string> used_names;
    for (const auto& r : market.reports) {
        pmas += csv_row({r.pma, std::to_string(r.capacity)});
        const auto base = safe_name(r.pma);
        if (!used_names.insert(base).second)
            throw IoError("PMA ids collide after filename sanitizing: " + r.pma);

        std::string pops = csv_row(
            {"population_id", "name", "kind", "min_target", "max_quota", "is_gender",
             "overrides"});
        for (const auto& p : r.populations) {
            pops += csv_row({p.id, p.name,
                             p.kind == PopulationKind::binary ? "binary" : "multi_valued",
                             std::to_string(p.min_target),
                             p.max_quota ? std::to_string(*p.max_quota) : "",
                             p.is_gender ? "1" : "0", pack_overrides(p.overrides)});
        }
        write_file(dir / ("pma_" + base + ".populations.csv"), pops);

        // Fig-2-style candidate sheet: ranking plus one column per population.
        std::vector<std::string> header{"candidate_id", "ranking"};
        for (const auto& p : r.populations) header.push_back(p.id);
        std::string cand_rows = csv_row(header);
        for (const auto& c : market.candidates) {
            const auto it = r.ranking.find(c.id);
            if (it == r.ranking.end()) continue;
            std::vector<std::string> row{c.id, std::to_string(it->second)};
            for (const auto& p : r.populations) {
                if (p.kind == PopulationKind::binary) {
                    const bool in = std::find(p.members.begin(), p.members.end(), c.id) !=
                                    p.members.end();
                    row.push_back(in ? "1" : "");
                } else {
                    const auto v = p.values.find(c.id);
                    row.push_back(v == p.values.end() ? "" : v->second);
                }
            }
            cand_rows += csv_row(row);
        }
        write_file(dir / ("pma_" + base + ".candidates.csv"), cand_rows);
    }
    write_file(dir / "pmas.csv", pmas);
}

Market load_market_csv(const std::filesystem::path& dir) {
    Market mkt;
    for (const auto& row : parse_csv(read_file(dir / "market.csv"))) {
        if (row.size() >= 2 && row[0] == "tie_break_seed")
            mkt.tie_break_seed = std::stoull(row[1]);
    }

    auto candidates = parse_csv(read_file(dir / "candidates.csv"));
    for (std::size_t i = 1; i < candidates.size(); ++i)
        mkt.candidates.push_back({candidates[i].at(0), {}, {}});

    auto index_of = [&](const CandidateId& id) -> Candidate& {
        for (auto& c : mkt.candidates)
            if (c.id == id) return c;
        throw IoError("preferences.csv references unknown candidate " + id);
    };

    auto preferences = parse_csv(read_file(dir / "preferences.csv"));
    std::map<CandidateId, std::map<int, PmaId>> prefs;
    for (std::size_t i = 1; i < preferences.size(); ++i)
        prefs[preferences[i].at(0)][std::stoi(preferences[i].at(1))] = preferences[i].at(2);
    for (auto& [cid, by_pos] : prefs) {
        auto& cand = index_of(cid);
        for (auto& [pos, pma] : by_pos) cand.preferences.push_back(pma);
    }

    if (std::filesystem::exists(dir / "attributes.csv")) {
        auto attributes = parse_csv(read_file(dir / "attributes.csv"));
        for (std::size_t i = 1; i < attributes.size(); ++i)
            index_of(attributes[i].at(0)).attributes[attributes[i].at(1)] =
                attributes[i].at(2);
    }

    auto pmas = parse_csv(read_file(dir / "pmas.csv"));
    for (std::size_t i = 1; i < pmas.size(); ++i) {
        PreferenceReport r;
        r.pma = pmas[i].at(0);
        r.capacity = std::stoi(pmas[i].at(1));
        const auto base = safe_name(r.pma);

        auto pops = parse_csv(read_file(dir / ("pma_" + base + ".populations.csv")));
        for (std::size_t k = 1; k < pops.size(); ++k) {
            RawPopulation p;
            p.id = pops[k].at(0);
            p.name = pops[k].at(1);
            p.kind = pops[k].at(2) == "binary" ? PopulationKind::binary
                                               : PopulationKind::multi_valued;
            p.min_target = std::stoi(pops[k].at(3));
            if (!pops[k].at(4).empty()) p.max_quota = std::stoi(pops[k].at(4));
            p.is_gender = pops[k].at(5) == "1";
            if (!pops[k].at(6).empty()) p.overrides = unpack_overrides(pops[k].at(6));
            r.populations.push_back(std::move(p));
        }

        auto cand_rows = parse_csv(read_file(dir / ("pma_" + base + ".candidates.csv")));
        if (cand_rows.empty()) throw IoError("empty candidates sheet for PMA " + r.pma);
        const auto& header = cand_rows[0];
        for (std::size_t k = 1; k < cand_rows.size(); ++k) {
            const auto& row = cand_rows[k];
            r.ranking[row.at(0)] = std::stoi(row.at(1));
            for (std::size_t col = 2; col < header.size() && col < row.size(); ++col) {
                if (row[col].empty()) continue;
                for (auto& p : r.populations) {
                    if (p.id != header[col]) continue;
                    if (p.kind == PopulationKind::binary)
                        p.members.push_back(row.at(0));
                    else
                        p.values[row.at(0)] = row[col];
                }
            }
        }
        for (auto& p : r.populations) std::sort(p.members.begin(), p.members.end());
        mkt.reports.push_back(std::move(r));
    }
    return mkt;
}

Market load_market(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) return load_market_csv(path);
    return load_market_json(path);
}

Matching load_matching_json(const std::filesystem::path& path) {
    const json j = parse(read_file(path), "matching");
    Matching m;
    for (const auto& [c, pma] : j.at("assignment").items())
        m.assign(c, pma.get<std::string>());
    return m;
}

void save_matching_json(const Matching& matching, const Market& market,
                        const std::filesystem::path& path) {
    json j;
    j["schema_version"] = 1;
    json assignment = json::object();
    for (const auto& c : market.candidates)
        if (auto m = matching.pma_of(c.id)) assignment[c.id] = *m;
    j["assignment"] = std::move(assignment);
    write_json(j, path);
}

void save_outcome_json(const MatchOutcome& outcome, const Market& market,
                       const std::filesystem::path& path) {
    json j;
    j["schema_version"] = 1;
    json assignment = json::object();
    for (const auto& c : market.candidates)
        if (auto m = outcome.matching.pma_of(c.id)) assignment[c.id] = *m;
    j["matching"] = std::move(assignment);
    json rounds = json::array();
    for (std::size_t r = 0; r < outcome.rounds.size(); ++r) {
        json rj;
        rj["round"] = r + 1;
        json apps = json::object();
        for (const auto& [c, m] : outcome.rounds[r].applications) apps[c] = m;
        rj["applications"] = std::move(apps);
        json rej = json::object();
        for (const auto& [m, cs] : outcome.rounds[r].rejections) rej[m] = cs;
        rj["rejections"] = std::move(rej);
        rounds.push_back(std::move(rj));
    }
    j["rounds"] = std::move(rounds);
    json stages = json::array();
    for (const auto& s : outcome.stage_log) {
        json sj;
        sj["stage"] = s.stage == StageResolution::Stage::candidate ? "candidate" : "pma";
        sj["pma"] = s.pma;
        sj["assigned"] = s.assigned;
        if (s.displaced)
            sj["displaced"] = *s.displaced;
        else
            sj["displaced"] = nullptr;
        stages.push_back(std::move(sj));
    }
    j["stages"] = std::move(stages);
    j["alternation_cap_hit"] = outcome.alternation_cap_hit;
    j["stage_cap_hit"] = outcome.stage_cap_hit;
    write_json(j, path);
}

void save_audit_json(const IrReport& ir, const std::vector<BlockingPair>& pairs,
                     const std::filesystem::path& path) {
    json j;
    j["schema_version"] = 1;
    j["individually_rational"] = ir.ok;
    json irv = json::array();
    for (const auto& w : ir.witnesses)
        irv.push_back({{"code", w.code}, {"candidate", w.candidate}, {"pma", w.pma}});
    j["ir_violations"] = std::move(irv);
    json bp = json::array();
    int real = 0, artifact = 0;
    std::set<PmaId> pmas;
    for (const auto& p : pairs) {
        json pj;
        pj["candidate"] = p.candidate;
        pj["pma"] = p.pma;
        pj["classification"] = to_string(p.classification);
        pj["accept_pass"] = to_string(p.accept_pass);
        pj["chosen"] = p.chosen;
        bp.push_back(std::move(pj));
        (p.classification == BlockingClass::real ? real : artifact) += 1;
        pmas.insert(p.pma);
    }
    j["blocking_pairs"] = std::move(bp);
    j["counts"] = {{"total", pairs.size()},
                   {"real", real},
                   {"tie_break_artifact", artifact},
                   {"distinct_pmas", pmas.size()}};
    write_json(j, path);
}

void save_explanations_csv(const std::vector<Explanation>& explanations,
                           const std::filesystem::path& path) {
    std::string out = csv_row({"pma", "candidate", "category", "detail"});
    for (const auto& e : explanations)
        out += csv_row({e.pma, e.candidate, to_string(e.category), e.detail});
    write_file(path, out);
}

void save_summary_json(const OutcomeStats& stats, const std::filesystem::path& path) {
    json j;
    j["schema_version"] = 1;
    j["candidates"] = stats.candidates;
    j["candidates_with_preferences"] = stats.candidates_with_preferences;
    j["matched"] = stats.matched;
    j["top_choice_fraction"] = stats.top_choice_fraction;
    j["slots_total"] = stats.slots_total;
    j["slots_filled_fraction"] = stats.slots_filled_fraction;
    j["blocking_pairs"] = {{"total", stats.blocking_total},
                           {"real", stats.blocking_real},
                           {"tie_break_artifact", stats.blocking_tie_break_artifact},
                           {"distinct_pmas", stats.blocking_distinct_pmas}};
    json pops = json::array();
    for (const auto& u : stats.populations) {
        json uj;
        uj["pma"] = u.pma;
        uj["population"] = u.population;
        uj["min_target"] = u.min_target;
        if (u.max_quota)
            uj["max_quota"] = *u.max_quota;
        else
            uj["max_quota"] = nullptr;
        uj["assigned"] = u.assigned;
        uj["target_met"] = u.target_met;
        pops.push_back(std::move(uj));
    }
    j["populations"] = std::move(pops);
    write_json(j, path);
}

void save_structure_json(const StructureReport& report, const std::filesystem::path& path) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = to_string(report.kind);
    j["market_guarantee"] = to_string(report.guarantee);
    json pmas = json::array();
    for (const auto& p : report.pmas) {
        json pj;
        pj["pma"] = p.pma;
        pj["laminar"] = p.laminar;
        if (p.laminar_witness)
            pj["laminar_witness"] = {{"pop_a", p.laminar_witness->pop_a},
                                     {"pop_b", p.laminar_witness->pop_b},
                                     {"only_a", p.laminar_witness->only_a},
                                     {"shared", p.laminar_witness->shared},
                                     {"only_b", p.laminar_witness->only_b}};
        else
            pj["laminar_witness"] = nullptr;
        pj["min_targets_pairwise_disjoint"] = p.min_targets_pairwise_disjoint;
        if (p.disjoint_witness)
            pj["disjoint_witness"] = {{"pop_a", p.disjoint_witness->pop_a},
                                      {"pop_b", p.disjoint_witness->pop_b},
                                      {"shared", p.disjoint_witness->shared}};
        else
            pj["disjoint_witness"] = nullptr;
        pj["min_targets_disjoint_chains"] = p.min_targets_disjoint_chains;
        if (p.chain_witness)
            pj["chain_witness"] = {{"container", p.chain_witness->container},
                                   {"pop_a", p.chain_witness->pop_a},
                                   {"pop_b", p.chain_witness->pop_b}};
        else
            pj["chain_witness"] = nullptr;
        pmas.push_back(std::move(pj));
    }
    j["pmas"] = std::move(pmas);
    write_json(j, path);
}

void save_manifest_json(const RunManifest& manifest, const std::filesystem::path& path) {
    json j;
    j["schema_version"] = 1;
    j["tool_version"] = kToolVersion;
    j["command"] = manifest.command;
    j["input"] = manifest.input;
    json flags = json::object();
    for (const auto& [k, v] : manifest.flags) flags[k] = v;
    j["flags"] = std::move(flags);
    j["seed"] = manifest.seed;
    j["outputs"] = manifest.outputs;
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    j["created_utc"] = buf;
    write_json(j, path);
}

synth::GenConfig load_gen_config_json(const std::filesystem::path& path) {
    const json j = parse(read_file(path), "generator config");
    synth::GenConfig cfg;
    cfg.candidates = j.value("candidates", cfg.candidates);
    cfg.pmas = j.value("pmas", cfg.pmas);
    if (j.contains("slots")) {
        cfg.slots_min = j.at("slots").at(0).get<int>();
        cfg.slots_max = j.at("slots").at(1).get<int>();
    }
    if (j.contains("total_slots") && !j.at("total_slots").is_null())
        cfg.total_slots = j.at("total_slots").get<int>();
    if (j.contains("mode")) cfg.mode = synth::gen_mode_from_string(j.at("mode"));
    if (j.contains("populations")) {
        cfg.pops_min = j.at("populations").at(0).get<int>();
        cfg.pops_max = j.at("populations").at(1).get<int>();
    }
    cfg.min_target_density = j.value("min_target_density", cfg.min_target_density);
    cfg.max_quota_density = j.value("max_quota_density", cfg.max_quota_density);
    cfg.alpha = j.value("alpha", cfg.alpha);
    if (j.contains("list_length")) {
        cfg.list_min = j.at("list_length").at(0).get<int>();
        cfg.list_max = j.at("list_length").at(1).get<int>();
    }
    cfg.tie_probability = j.value("tie_probability", cfg.tie_probability);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

}  // namespace popmatch::io
