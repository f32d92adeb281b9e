// judgekit: batch VLM/LLM-as-judge evaluation pipeline.
//
// Stage-per-command layout: simulate | respond | judge | debate | kappa |
// select | collective | report, all operating on one workspace directory.
// Re-running a completed stage is a no-op unless --force; the effective
// configuration is normalized, stored in the manifest, and digest-checked
// on every stage so a workspace cannot silently mix configurations.
//
// Exit codes: 0 success, 1 usage, 2 data/config error, 3 gateway failures
// beyond the configured completion fraction.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "judgekit/aggregation.hpp"
#include "judgekit/debate.hpp"
#include "judgekit/judge.hpp"
#include "judgekit/reports.hpp"
#include "judgekit/simulator.hpp"
#include "judgekit/storage.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace judgekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitGateway = 3;

// ---------------------------------------------------------------------------
// Effective configuration: everything a run depends on, normalized so that
// its JSON form (and therefore the digest) is identical across stages.
// ---------------------------------------------------------------------------

json gateway_to_json(const GatewayConfig& g) {
    return {{"endpoint_url", g.endpoint_url},
            {"model_name", g.model_name},
            {"api_key_env", g.api_key_env},
            {"max_in_flight", g.max_in_flight},
            {"max_retries", g.max_retries},
            {"timeout_ms", g.timeout.count()},
            {"temperature", g.temperature},
            {"retry_backoff_ms", g.retry_backoff.count()}};
}

GatewayConfig gateway_from_json(const json& j, const GatewayConfig& base = {}) {
    GatewayConfig g = base;
    g.endpoint_url = j.value("endpoint_url", g.endpoint_url);
    g.model_name = j.value("model_name", g.model_name);
    g.api_key_env = j.value("api_key_env", g.api_key_env);
    g.max_in_flight = j.value("max_in_flight", g.max_in_flight);
    g.max_retries = j.value("max_retries", g.max_retries);
    g.timeout = std::chrono::milliseconds(j.value("timeout_ms", g.timeout.count()));
    g.temperature = j.value("temperature", g.temperature);
    g.retry_backoff =
        std::chrono::milliseconds(j.value("retry_backoff_ms", g.retry_backoff.count()));
    return g;
}

json profile_to_json(const JudgeProfile& p) {
    json j{{"profile_id", p.profile_id}, {"seed", p.seed}};
    if (const auto* c = std::get_if<CalibratedProfile>(&p.kind)) {
        j["kind"] = "calibrated";
        j["sigma"] = c->sigma;
    } else if (const auto* l = std::get_if<LenientProfile>(&p.kind)) {
        j["kind"] = "lenient";
        j["mode_rating"] = l->mode_rating.value();
        j["p_mode"] = l->p_mode;
    } else if (const auto* b = std::get_if<BiasedProfile>(&p.kind)) {
        j["kind"] = "biased";
        j["delta"] = b->delta;
        j["sigma"] = b->sigma;
    }
    return j;
}

JudgeProfile profile_from_json(const json& j, std::uint64_t run_seed) {
    const auto id = j.at("profile_id").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    const std::uint64_t seed = j.value("seed", run_seed ^ fnv1a64(id));
    if (kind == "calibrated") {
        return calibrated_profile(id, j.value("sigma", 0.3), seed);
    }
    if (kind == "lenient") {
        return lenient_profile(id, Rating(j.value("mode_rating", 4)), j.value("p_mode", 0.9),
                               seed);
    }
    if (kind == "biased") {
        return biased_profile(id, j.value("delta", 1.0), j.value("sigma", 0.3), seed);
    }
    throw Error("unknown profile kind '" + kind + "'");
}

struct CliConfig {
    std::uint64_t seed = 0;
    std::vector<std::string> candidates;
    JudgeRoster roster{{}, ""};
    std::map<std::string, GatewayConfig> gateways;
    std::optional<GatewayConfig> default_gateway;
    DebateConfig debate;
    std::optional<SelectionRule> selection;
    /// When set, kappa is estimated on this held-out fraction of the
    /// records only, so the selection gate never sees the records it will
    /// be evaluated on.
    std::optional<double> calibration_fraction;
    double completion_fraction = 1.0;
    int max_in_flight = 4;
    int records_per_dimension = 2;
    std::vector<JudgeProfile> profiles;
    bool profiles_explicit = false;  // false: derived from the seed

    json to_json() const;
    static CliConfig from_json(const json& j);
};

json CliConfig::to_json() const {
    json gateways_json = json::object();
    for (const auto& [id, g] : gateways) gateways_json[id] = gateway_to_json(g);
    if (default_gateway.has_value()) gateways_json["default"] = gateway_to_json(*default_gateway);

    json profiles_json;  // null: the stock pool derived from the seed
    if (profiles_explicit) {
        profiles_json = json::array();
        for (const auto& p : profiles) profiles_json.push_back(profile_to_json(p));
    }

    return {{"seed", seed},
            {"candidates", candidates},
            {"roster", {{"judges", roster.judges}, {"final_judge", roster.final_judge}}},
            {"gateways", gateways_json},
            {"debate",
             {{"num_debaters", debate.num_debaters},
              {"num_rounds", debate.num_rounds},
              {"judge_id", debate.judge_id},
              {"debater_gateway", gateway_to_json(debate.debater_gateway)},
              {"consolidator_gateway", gateway_to_json(debate.consolidator_gateway)}}},
            {"selection", selection.has_value() ? json(selection->to_string()) : json(nullptr)},
            {"calibration_fraction",
             calibration_fraction.has_value() ? json(*calibration_fraction) : json(nullptr)},
            {"completion_fraction", completion_fraction},
            {"max_in_flight", max_in_flight},
            {"simulator",
             {{"records_per_dimension", records_per_dimension}, {"profiles", profiles_json}}},
            {"prompt_version", kPromptTemplateVersion}};
}

GatewayConfig mock_gateway(const std::string& name) {
    GatewayConfig g;
    g.endpoint_url = "mock://" + name;
    g.model_name = name;
    return g;
}

CliConfig CliConfig::from_json(const json& j) {
    CliConfig c;
    c.seed = j.value("seed", std::uint64_t{0});
    c.candidates = j.value("candidates", std::vector<std::string>{});
    if (j.contains("roster")) {
        c.roster.judges = j["roster"].value("judges", std::vector<std::string>{});
        c.roster.final_judge = j["roster"].value("final_judge", std::string{});
    }
    if (j.contains("gateways")) {
        for (const auto& [id, g] : j["gateways"].items()) {
            if (id == "default") {
                c.default_gateway = gateway_from_json(g);
            } else {
                GatewayConfig base;
                base.model_name = id;
                c.gateways.emplace(id, gateway_from_json(g, base));
            }
        }
    } else {
        c.default_gateway = mock_gateway("default");
    }
    c.debate.debater_gateway = mock_gateway("debater");
    c.debate.consolidator_gateway = mock_gateway("consolidator");
    if (j.contains("debate")) {
        const auto& d = j["debate"];
        c.debate.num_debaters = d.value("num_debaters", 2);
        c.debate.num_rounds = d.value("num_rounds", 2);
        c.debate.judge_id = d.value("judge_id", std::string(kDefaultDebateJudgeId));
        if (d.contains("debater_gateway")) {
            c.debate.debater_gateway =
                gateway_from_json(d["debater_gateway"], c.debate.debater_gateway);
        }
        if (d.contains("consolidator_gateway")) {
            c.debate.consolidator_gateway =
                gateway_from_json(d["consolidator_gateway"], c.debate.consolidator_gateway);
        }
    }
    if (c.debate.num_debaters < 2) throw Error("debate.num_debaters must be >= 2");
    if (c.debate.num_rounds < 1) throw Error("debate.num_rounds must be >= 1");
    if (j.contains("selection") && !j["selection"].is_null()) {
        c.selection = SelectionRule::parse(j["selection"].get<std::string>());
    }
    if (j.contains("calibration_fraction") && !j["calibration_fraction"].is_null()) {
        const double fraction = j["calibration_fraction"].get<double>();
        if (fraction <= 0.0 || fraction >= 1.0) {
            throw Error("calibration_fraction must be in (0, 1)");
        }
        c.calibration_fraction = fraction;
    }
    c.completion_fraction = j.value("completion_fraction", 1.0);
    if (c.completion_fraction < 0.0 || c.completion_fraction > 1.0) {
        throw Error("completion_fraction must be in [0, 1]");
    }
    c.max_in_flight = std::max(1, j.value("max_in_flight", 4));
    if (j.contains("simulator")) {
        c.records_per_dimension = j["simulator"].value("records_per_dimension", 2);
        if (j["simulator"].contains("profiles") && !j["simulator"]["profiles"].is_null()) {
            c.profiles_explicit = true;
            for (const auto& p : j["simulator"]["profiles"]) {
                c.profiles.push_back(profile_from_json(p, c.seed));
            }
        }
    }
    if (!c.profiles_explicit) c.profiles = default_profiles(c.seed);
    if (c.profiles.empty()) throw Error("simulator.profiles must not be an empty list");
    if (c.records_per_dimension < 1) throw Error("records_per_dimension must be >= 1");
    return c;
}

// ---------------------------------------------------------------------------
// Stage plumbing
// ---------------------------------------------------------------------------

struct StageOptions {
    std::string workspace;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> rule;
    std::optional<int> max_in_flight;
    std::optional<int> records_per_dim;
    std::optional<double> calibration_fraction;
    bool force = false;
};

void add_common_options(CLI::App* cmd, StageOptions& opts) {
    cmd->add_option("--workspace", opts.workspace, "Run workspace directory")->required();
    cmd->add_option("--config", opts.config_path, "Configuration file (JSON)");
    cmd->add_option("--seed", opts.seed, "Run seed (overrides config)");
    cmd->add_option("--rule", opts.rule,
                    "Selection rule, threshold=<theta> or top_k=<k> (overrides config)");
    cmd->add_option("--max-in-flight", opts.max_in_flight,
                    "Global concurrent-request budget (overrides config)");
    cmd->add_flag("--force", opts.force, "Re-run the stage even if already complete");
}

struct Stage {
    Workspace workspace;
    CliConfig config;
    RunManifest manifest;
    bool already_done = false;

    void finish(const std::string& stage_name) {
        manifest.stages.insert(stage_name);
        workspace.save_manifest(manifest);
    }
};

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("config: ") + e.what());
    }
}

/// The data-lineage subset of the effective config: what the stored corpus
/// and simulated reviews were derived from. Changing it against an existing
/// workspace requires --force; stage parameters (rule, roster, gateways...)
/// are adopted freely with the manifest digest updated.
json identity_of(const json& effective) {
    json identity = json::object();
    for (const char* key : {"seed", "simulator", "prompt_version"}) {
        if (effective.contains(key)) identity[key] = effective[key];
    }
    return identity;
}

/// Builds the stage context: overlays (stored effective config | config
/// file | flags), normalizes, and reconciles with the manifest.
Stage open_stage(const StageOptions& opts, const std::string& stage_name) {
    Workspace workspace{fs::path(opts.workspace)};

    json base = json::object();
    std::optional<RunManifest> stored;
    if (workspace.has_manifest()) {
        const auto manifest_json =
            json::parse(std::ifstream(workspace.manifest_path()), nullptr, true);
        stored = manifest_from_json(manifest_json);
        if (manifest_json.contains("effective_config")) {
            base = manifest_json["effective_config"];
        }
    }
    const json stored_base = base;
    if (!opts.config_path.empty()) {
        base.update(load_config_file(opts.config_path));
    }
    if (opts.seed.has_value()) base["seed"] = *opts.seed;
    if (opts.rule.has_value()) base["selection"] = *opts.rule;
    if (opts.max_in_flight.has_value()) base["max_in_flight"] = *opts.max_in_flight;
    if (opts.calibration_fraction.has_value()) {
        base["calibration_fraction"] = *opts.calibration_fraction;
    }
    if (opts.records_per_dim.has_value()) {
        base["simulator"]["records_per_dimension"] = *opts.records_per_dim;
    }

    CliConfig config = CliConfig::from_json(base);
    const json effective = config.to_json();
    const std::string digest = config_digest(effective);

    RunManifest manifest;
    bool config_changed = false;
    if (stored.has_value()) {
        if (identity_of(stored_base) != identity_of(effective) && !opts.force) {
            throw Error("workspace data was generated under a different seed/simulator "
                        "configuration; pass --force to regenerate or use a fresh workspace");
        }
        manifest = *stored;
        config_changed = (digest != manifest.config_digest);
        manifest.config_digest = digest;  // run_id and created_at stay fixed
    } else {
        manifest = make_manifest(effective, config.seed);
    }

    Stage stage{std::move(workspace), std::move(config), std::move(manifest), false};
    if (stage.manifest.stage_done(stage_name) && !config_changed && !opts.force) {
        stage.already_done = true;
        return stage;
    }
    stage.manifest.stages.erase(stage_name);

    // Persist identity (and the effective config) before doing stage work.
    json manifest_json = manifest_to_json(stage.manifest);
    manifest_json["effective_config"] = effective;
    atomic_write(stage.workspace.manifest_path(), manifest_json.dump(2) + "\n");
    return stage;
}

void save_stage_manifest(Stage& stage, const std::string& stage_name) {
    stage.manifest.stages.insert(stage_name);
    json manifest_json = manifest_to_json(stage.manifest);
    manifest_json["effective_config"] = stage.config.to_json();
    atomic_write(stage.workspace.manifest_path(), manifest_json.dump(2) + "\n");
}

ConfigGatewayProvider make_provider(const CliConfig& config) {
    std::unordered_map<std::string, GatewayConfig> configs;
    for (auto [id, g] : config.gateways) {
        if (g.max_in_flight > config.max_in_flight) g.max_in_flight = config.max_in_flight;
        configs.emplace(id, std::move(g));
    }
    auto fallback = config.default_gateway;
    if (fallback.has_value() && fallback->max_in_flight > config.max_in_flight) {
        fallback->max_in_flight = config.max_in_flight;
    }
    return ConfigGatewayProvider(std::move(configs), std::move(fallback));
}

template <typename Item, typename Fn>
void parallel_for(const std::vector<Item>& items, int workers, Fn fn) {
    std::atomic<std::size_t> next{0};
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(items.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
                fn(items[i], i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

struct FailureLedger {
    std::vector<json> entries;
    std::mutex mutex;

    void add(const std::string& record_id, const std::string& candidate_id,
             const std::string& actor, const std::string& error) {
        std::lock_guard lock(mutex);
        entries.push_back(json{{"record_id", record_id},
                               {"candidate_id", candidate_id},
                               {"actor", actor},
                               {"error", error}});
    }
};

/// Rewrites the stage's section of failures.json; other stages' entries
/// are preserved. The file exists only when some stage has failures.
void persist_failures(const Workspace& workspace, const std::string& stage_name,
                      FailureLedger& ledger) {
    json all = json::object();
    if (fs::exists(workspace.failures_path())) {
        all = json::parse(std::ifstream(workspace.failures_path()), nullptr, true);
    }
    std::sort(ledger.entries.begin(), ledger.entries.end(),
              [](const json& a, const json& b) { return a.dump() < b.dump(); });
    all[stage_name] = ledger.entries;
    if (ledger.entries.empty()) all.erase(stage_name);
    if (all.empty()) {
        std::error_code ec;
        fs::remove(workspace.failures_path(), ec);
    } else {
        atomic_write(workspace.failures_path(), all.dump(2) + "\n");
    }
}

int completion_exit(const Stage& stage, std::size_t completed, std::size_t total,
                    FailureLedger& ledger, const std::string& stage_name) {
    persist_failures(stage.workspace, stage_name, ledger);
    if (total > 0 && static_cast<double>(completed) <
                         stage.config.completion_fraction * static_cast<double>(total)) {
        std::cerr << "judgekit " << stage_name << ": only " << completed << "/" << total
                  << " items completed (completion_fraction "
                  << stage.config.completion_fraction << ")\n";
        return kExitGateway;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

int cmd_simulate(const StageOptions& opts) {
    Stage stage = open_stage(opts, "simulate");
    if (stage.already_done) {
        std::cout << "simulate: already complete (use --force to re-run)\n";
        return kExitOk;
    }
    const auto& config = stage.config;

    const auto corpus = generate_corpus(config.records_per_dimension, config.seed);
    write_records(stage.workspace.records_path(), corpus.records);

    std::vector<CandidateResponse> responses;
    for (const auto& record : corpus.records) {
        responses.push_back({record.record_id, std::string(kSimulatedCandidateId),
                             "Simulated candidate answer for clip " + record.record_id + "."});
    }
    write_responses(stage.workspace.responses_path(), responses);

    json latent = json::object();
    for (const auto& [id, q] : corpus.latent_quality) latent[id] = q;
    atomic_write(stage.workspace.latent_path(), latent.dump(2) + "\n");

    auto reviews = simulate_pool(config.profiles, corpus);
    reviews.insert(reviews.end(), corpus.reference_reviews.begin(),
                   corpus.reference_reviews.end());

    std::set<std::string> profile_ids;
    for (const auto& p : config.profiles) profile_ids.insert(p.profile_id);
    const std::string debate_judge = config.debate.judge_id;
    stage.workspace.merge_reviews(reviews, [&](const Review& r) {
        return (r.mode == ReviewMode::individual && profile_ids.count(r.judge_id) > 0) ||
               (r.mode == ReviewMode::debate && r.judge_id == debate_judge);
    });

    save_stage_manifest(stage, "simulate");
    std::cout << "simulate: " << corpus.records.size() << " records, " << reviews.size()
              << " simulated reviews (" << config.profiles.size() << " profiles + reference)\n";
    return kExitOk;
}

int cmd_respond(const StageOptions& opts) {
    Stage stage = open_stage(opts, "respond");
    if (stage.already_done) {
        std::cout << "respond: already complete (use --force to re-run)\n";
        return kExitOk;
    }
    const auto& config = stage.config;
    if (config.candidates.empty()) {
        throw Error("no candidates configured; set \"candidates\" in the config file");
    }

    const auto records = load_records(stage.workspace.records_path());
    auto provider = make_provider(config);

    struct Item {
        const QARecord* record;
        const std::string* candidate;
    };
    std::vector<Item> items;
    for (const auto& candidate : config.candidates) {
        for (const auto& record : records) items.push_back({&record, &candidate});
    }

    std::vector<std::optional<CandidateResponse>> out(items.size());
    FailureLedger ledger;
    parallel_for(items, config.max_in_flight, [&](const Item& item, std::size_t i) {
        try {
            const auto prompt = render_candidate_prompt(*item.record, *item.candidate);
            const std::string text = provider.gateway_for(*item.candidate).complete(prompt);
            out[i] = CandidateResponse{item.record->record_id, *item.candidate, text};
        } catch (const Error& e) {
            ledger.add(item.record->record_id, *item.candidate, *item.candidate, e.what());
        }
    });

    std::vector<CandidateResponse> fresh;
    for (auto& r : out) {
        if (r.has_value()) fresh.push_back(std::move(*r));
    }
    const int exit_code =
        completion_exit(stage, fresh.size(), items.size(), ledger, "respond");
    if (exit_code != kExitOk) return exit_code;  // atomicity: nothing written

    std::vector<CandidateResponse> merged;
    const std::set<std::string> replacing(config.candidates.begin(), config.candidates.end());
    if (fs::exists(stage.workspace.responses_path())) {
        for (auto& existing : load_responses(stage.workspace.responses_path())) {
            if (replacing.count(existing.candidate_id) == 0) merged.push_back(std::move(existing));
        }
    }
    merged.insert(merged.end(), fresh.begin(), fresh.end());
    write_responses(stage.workspace.responses_path(), std::move(merged));

    save_stage_manifest(stage, "respond");
    std::cout << "respond: " << fresh.size() << " responses from " << config.candidates.size()
              << " candidate(s)\n";
    return kExitOk;
}

int cmd_judge(const StageOptions& opts) {
    Stage stage = open_stage(opts, "judge");
    if (stage.already_done) {
        std::cout << "judge: already complete (use --force to re-run)\n";
        return kExitOk;
    }
    const auto& config = stage.config;
    if (config.roster.judges.empty()) {
        throw Error("no judges configured; set roster.judges in the config file");
    }

    const auto records = load_records(stage.workspace.records_path());
    const auto responses = load_responses(stage.workspace.responses_path());
    std::map<std::string, const QARecord*> record_index;
    for (const auto& r : records) record_index.emplace(r.record_id, &r);

    auto provider = make_provider(config);

    struct Item {
        const QARecord* record;
        const CandidateResponse* response;
        const std::string* judge;
    };
    std::vector<Item> items;
    for (const auto& response : responses) {
        const auto it = record_index.find(response.record_id);
        if (it == record_index.end()) {
            throw Error("response references unknown record '" + response.record_id + "'");
        }
        for (const auto& judge : config.roster.judges) {
            items.push_back({it->second, &response, &judge});
        }
    }

    std::vector<std::optional<Review>> out(items.size());
    FailureLedger ledger;
    parallel_for(items, config.max_in_flight, [&](const Item& item, std::size_t i) {
        try {
            out[i] = judge_one(*item.judge, *item.record, *item.response,
                               provider.gateway_for(*item.judge));
        } catch (const Error& e) {
            ledger.add(item.record->record_id, item.response->candidate_id, *item.judge,
                       e.what());
        }
    });

    std::vector<Review> fresh;
    for (auto& r : out) {
        if (r.has_value()) fresh.push_back(std::move(*r));
    }
    const int exit_code = completion_exit(stage, fresh.size(), items.size(), ledger, "judge");
    if (exit_code != kExitOk) return exit_code;

    const std::set<std::string> judges(config.roster.judges.begin(),
                                       config.roster.judges.end());
    stage.workspace.merge_reviews(fresh, [&](const Review& r) {
        return r.mode == ReviewMode::individual && judges.count(r.judge_id) > 0;
    });

    save_stage_manifest(stage, "judge");
    std::cout << "judge: " << fresh.size() << " individual reviews from " << judges.size()
              << " judge(s)\n";
    return kExitOk;
}

int cmd_debate(const StageOptions& opts) {
    Stage stage = open_stage(opts, "debate");
    if (stage.already_done) {
        std::cout << "debate: already complete (use --force to re-run)\n";
        return kExitOk;
    }
    const auto& config = stage.config;

    const auto records = load_records(stage.workspace.records_path());
    const auto responses = load_responses(stage.workspace.responses_path());
    std::map<std::string, const QARecord*> record_index;
    for (const auto& r : records) record_index.emplace(r.record_id, &r);

    auto debater_config = config.debate.debater_gateway;
    auto consolidator_config = config.debate.consolidator_gateway;
    debater_config.max_in_flight = std::min(debater_config.max_in_flight, config.max_in_flight);
    consolidator_config.max_in_flight =
        std::min(consolidator_config.max_in_flight, config.max_in_flight);
    const auto debater = make_gateway(debater_config);
    const auto consolidator = make_gateway(consolidator_config);

    struct Item {
        const QARecord* record;
        const CandidateResponse* response;
    };
    std::vector<Item> items;
    for (const auto& response : responses) {
        const auto it = record_index.find(response.record_id);
        if (it == record_index.end()) {
            throw Error("response references unknown record '" + response.record_id + "'");
        }
        items.push_back({it->second, &response});
    }

    std::vector<std::optional<DebateTranscript>> transcripts(items.size());
    FailureLedger ledger;
    // Debates already fan out across debaters; run them one at a time.
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        const TranscriptSink sink = [&](const DebateTranscript& t) { transcripts[i] = t; };
        try {
            run_debate(*item.record, *item.response, config.debate, *debater, *consolidator,
                       sink);
        } catch (const Error& e) {
            ledger.add(item.record->record_id, item.response->candidate_id, config.debate.judge_id,
                       e.what());
        }
    }

    std::vector<DebateTranscript> all;
    std::vector<Review> fresh;
    std::size_t completed = 0;
    for (auto& t : transcripts) {
        if (!t.has_value()) continue;
        if (t->final_review.has_value()) {
            fresh.push_back(*t->final_review);
            ++completed;
        }
        all.push_back(std::move(*t));
    }
    const int exit_code = completion_exit(stage, completed, items.size(), ledger, "debate");
    if (exit_code != kExitOk) return exit_code;

    write_transcripts(stage.workspace.transcripts_path(), std::move(all));
    const std::string debate_judge = config.debate.judge_id;
    stage.workspace.merge_reviews(fresh, [&](const Review& r) {
        return r.mode == ReviewMode::debate && r.judge_id == debate_judge;
    });

    save_stage_manifest(stage, "debate");
    std::cout << "debate: " << completed << " transcripts (" << config.debate.num_debaters
              << " debaters x " << config.debate.num_rounds << " rounds)\n";
    return kExitOk;
}

struct KappaOptions {
    std::string reference_judge;
    std::string test_judge;
    std::string test_mode;
};

int cmd_kappa(const StageOptions& opts, const KappaOptions& kappa_opts) {
    Stage stage = open_stage(opts, "kappa");
    if (stage.already_done) {
        std::cout << "kappa: already complete (use --force to re-run)\n";
        return kExitOk;
    }
    const auto& config = stage.config;

    const auto records = load_records(stage.workspace.records_path());
    const auto reviews = load_reviews(stage.workspace.reviews_path());
    const std::string reference_judge = kappa_opts.reference_judge.empty()
                                            ? config.debate.judge_id
                                            : kappa_opts.reference_judge;

    // With a calibration fraction, reliability is estimated on held-out
    // records only; the gated evaluation then runs on the rest.
    std::optional<std::set<std::string>> calibration_ids;
    if (config.calibration_fraction.has_value()) {
        const auto split =
            calibration_split(records, *config.calibration_fraction, config.seed);
        calibration_ids.emplace();
        for (const auto& r : split.calibration) calibration_ids->insert(r.record_id);
        std::cout << "kappa: calibration split holds " << calibration_ids->size() << " of "
                  << records.size() << " records\n";
    }

    std::vector<Review> reference, test;
    for (const auto& r : reviews) {
        if (calibration_ids.has_value() && calibration_ids->count(r.record_id) == 0) continue;
        if (r.judge_id == reference_judge) {
            reference.push_back(r);
            continue;
        }
        if (!kappa_opts.test_judge.empty() && r.judge_id != kappa_opts.test_judge) continue;
        if (!kappa_opts.test_mode.empty() &&
            r.mode != parse_review_mode(kappa_opts.test_mode)) {
            continue;
        }
        test.push_back(r);
    }
    if (reference.empty()) {
        throw Error("no reviews found for reference judge '" + reference_judge + "'");
    }

    const auto report = agreement_by_group(test, reference, make_dimension_index(records));
    write_agreement(stage.workspace.agreement_path(), report.scores);

    std::map<std::string, std::pair<double, int>> per_judge;
    for (const auto& s : report.scores) {
        if (s.undefined) continue;
        auto& acc = per_judge[s.judge_id];
        acc.first += s.kappa;
        ++acc.second;
    }
    std::cout << "kappa: " << report.scores.size() << " (judge, candidate, dimension) groups vs '"
              << reference_judge << "' (dropped " << report.dropped_test << " test / "
              << report.dropped_reference << " reference reviews)\n";
    for (const auto& [judge, acc] : per_judge) {
        std::cout << "  " << judge << ": mean kappa "
                  << (acc.second > 0 ? acc.first / acc.second : 0.0) << " over " << acc.second
                  << " defined groups\n";
    }

    save_stage_manifest(stage, "kappa");
    return kExitOk;
}

int cmd_select(const StageOptions& opts) {
    Stage stage = open_stage(opts, "select");
    if (stage.already_done) {
        std::cout << "select: already complete (use --force to re-run)\n";
        return kExitOk;
    }
    const auto& config = stage.config;

    const auto scores = load_agreement(stage.workspace.agreement_path());
    const auto matrix = build_reliability_matrix(scores, stage.manifest.run_id);

    JudgeRoster roster = config.roster;
    if (roster.judges.empty()) {
        std::set<std::string> ids;
        for (const auto& s : scores) ids.insert(s.judge_id);
        roster.judges.assign(ids.begin(), ids.end());
    }
    const SelectionRule rule = config.selection.has_value()
                                   ? *config.selection
                                   : SelectionRule::threshold(kDefaultSelectionThreshold);

    json by_dimension = json::object();
    for (const auto dim : all_dimensions()) {
        const auto selected = select_judges(matrix, dim, roster, rule);
        by_dimension[std::string(dimension_key(dim))] = selected;
        std::cout << dimension_key(dim) << ":";
        for (const auto& j : selected) std::cout << " " << j;
        std::cout << "\n";
    }

    const json selection{{"provenance", matrix.provenance},
                         {"rule", rule.to_string()},
                         {"by_dimension", by_dimension}};
    atomic_write(stage.workspace.selection_path(), selection.dump(2) + "\n");

    save_stage_manifest(stage, "select");
    return kExitOk;
}

int cmd_collective(const StageOptions& opts) {
    Stage stage = open_stage(opts, "collective");
    if (stage.already_done) {
        std::cout << "collective: already complete (use --force to re-run)\n";
        return kExitOk;
    }
    const auto& config = stage.config;
    if (config.roster.final_judge.empty()) {
        throw Error("no final judge configured; set roster.final_judge in the config file");
    }

    const auto records = load_records(stage.workspace.records_path());
    const auto responses = load_responses(stage.workspace.responses_path());
    const auto reviews = load_reviews(stage.workspace.reviews_path());
    std::map<std::string, const QARecord*> record_index;
    for (const auto& r : records) record_index.emplace(r.record_id, &r);

    // Per-dimension judge subsets from the selection stage, if it ran.
    std::map<VisualDimension, std::set<std::string>> selected;
    if (fs::exists(stage.workspace.selection_path())) {
        const auto sel = json::parse(std::ifstream(stage.workspace.selection_path()));
        for (const auto& [key, judges] : sel.at("by_dimension").items()) {
            auto& set = selected[parse_dimension(key)];
            for (const auto& j : judges) set.insert(j.get<std::string>());
        }
    } else {
        for (const auto dim : all_dimensions()) {
            selected[dim] = std::set<std::string>(config.roster.judges.begin(),
                                                  config.roster.judges.end());
        }
    }

    std::map<std::pair<std::string, std::string>, std::vector<Review>> initial;
    for (const auto& r : reviews) {
        if (r.mode != ReviewMode::individual) continue;
        const auto rec = record_index.find(r.record_id);
        if (rec == record_index.end()) continue;
        if (selected.at(rec->second->dimension).count(r.judge_id) == 0) continue;
        initial[{r.record_id, r.candidate_id}].push_back(r);
    }

    auto provider = make_provider(config);

    struct Item {
        const QARecord* record;
        const CandidateResponse* response;
    };
    std::vector<Item> items;
    for (const auto& response : responses) {
        const auto it = record_index.find(response.record_id);
        if (it == record_index.end()) {
            throw Error("response references unknown record '" + response.record_id + "'");
        }
        items.push_back({it->second, &response});
    }

    std::vector<std::optional<Review>> out(items.size());
    std::atomic<std::int64_t> fallbacks{0};
    FailureLedger ledger;
    const std::vector<Review> empty;
    parallel_for(items, config.max_in_flight, [&](const Item& item, std::size_t i) {
        const auto it = initial.find({item.record->record_id, item.response->candidate_id});
        const auto& panel = (it == initial.end()) ? empty : it->second;
        try {
            auto outcome =
                collective_review(*item.record, *item.response, panel,
                                  config.roster.final_judge,
                                  provider.gateway_for(config.roster.final_judge));
            if (outcome.single_judge_fallback) ++fallbacks;
            out[i] = std::move(outcome.review);
        } catch (const Error& e) {
            ledger.add(item.record->record_id, item.response->candidate_id,
                       config.roster.final_judge, e.what());
        }
    });

    std::vector<Review> fresh;
    for (auto& r : out) {
        if (r.has_value()) fresh.push_back(std::move(*r));
    }
    const int exit_code =
        completion_exit(stage, fresh.size(), items.size(), ledger, "collective");
    if (exit_code != kExitOk) return exit_code;

    const std::string final_judge = config.roster.final_judge;
    stage.workspace.merge_reviews(fresh, [&](const Review& r) {
        return r.mode == ReviewMode::collective && r.judge_id == final_judge;
    });

    save_stage_manifest(stage, "collective");
    std::cout << "collective: " << fresh.size() << " final reviews by " << final_judge;
    if (fallbacks > 0) {
        std::cout << " (" << fallbacks << " with an empty panel: single-judge fallback)";
    }
    std::cout << "\n";
    return kExitOk;
}

int cmd_report(const StageOptions& opts) {
    Stage stage = open_stage(opts, "report");
    if (stage.already_done) {
        std::cout << "report: already complete (use --force to re-run)\n";
        return kExitOk;
    }

    const auto records = load_records(stage.workspace.records_path());
    const auto reviews = load_reviews(stage.workspace.reviews_path());
    const auto dimensions = make_dimension_index(records);

    std::vector<AgreementScore> scores;
    if (fs::exists(stage.workspace.agreement_path())) {
        scores = load_agreement(stage.workspace.agreement_path());
    }

    const auto dir = stage.workspace.reports_dir();
    atomic_write(dir / "score_table.csv", emit_score_table(reviews, dimensions));
    atomic_write(dir / "agreement_table.csv", emit_agreement_table(scores));
    atomic_write(dir / "histograms.json", emit_histograms(reviews).dump(2) + "\n");

    save_stage_manifest(stage, "report");
    std::cout << "report: wrote " << (dir / "score_table.csv").string()
              << ", agreement_table.csv, histograms.json\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch VLM-as-judge evaluation: individual reviews, reference-guided "
                 "debate, weighted-kappa reliability, judge selection, collective "
                 "assessment, and a synthetic-rater simulator."};
    app.require_subcommand(1);

    StageOptions opts;
    KappaOptions kappa_opts;

    auto* simulate = app.add_subcommand("simulate", "Generate a seeded synthetic corpus, "
                                                    "simulated rater pool, and reference reviews");
    add_common_options(simulate, opts);
    simulate->add_option("--records-per-dim", opts.records_per_dim,
                         "Synthetic records per visual dimension");

    auto* respond = app.add_subcommand("respond", "Collect candidate responses for every record");
    add_common_options(respond, opts);

    auto* judge = app.add_subcommand("judge", "Individual reviews from every roster judge");
    add_common_options(judge, opts);

    auto* debate =
        app.add_subcommand("debate", "Reference-guided multi-agent debate baseline reviews");
    add_common_options(debate, opts);

    auto* kappa = app.add_subcommand(
        "kappa", "Weighted Cohen's kappa of test judges against the reference judge");
    add_common_options(kappa, opts);
    kappa->add_option("--reference-judge", kappa_opts.reference_judge,
                      "Reference judge id (default: the debate judge)");
    kappa->add_option("--test-judge", kappa_opts.test_judge,
                      "Restrict the test side to one judge id");
    kappa->add_option("--test-mode", kappa_opts.test_mode,
                      "Restrict the test side to one review mode");
    kappa->add_option("--calibration-fraction", opts.calibration_fraction,
                      "Estimate kappa on this held-out fraction of the records only");

    auto* select = app.add_subcommand("select", "Per-dimension reliable judge subsets");
    add_common_options(select, opts);

    auto* collective =
        app.add_subcommand("collective", "Final-judge collective review over initial reviews");
    add_common_options(collective, opts);

    auto* report = app.add_subcommand("report", "Emit score/agreement tables and histograms");
    add_common_options(report, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (respond->parsed()) return cmd_respond(opts);
        if (judge->parsed()) return cmd_judge(opts);
        if (debate->parsed()) return cmd_debate(opts);
        if (kappa->parsed()) return cmd_kappa(opts, kappa_opts);
        if (select->parsed()) return cmd_select(opts);
        if (collective->parsed()) return cmd_collective(opts);
        if (report->parsed()) return cmd_report(opts);
    } catch (const GatewayError& e) {
        std::cerr << "judgekit: gateway error: " << e.what() << "\n";
        return kExitGateway;
    } catch (const Error& e) {
        std::cerr << "judgekit: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "judgekit: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
