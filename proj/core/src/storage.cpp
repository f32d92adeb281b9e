#include "judgekit/storage.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "judgekit/hash.hpp"

namespace judgekit {

namespace {

using nlohmann::json;

json parse_line(const std::string& line, std::size_t line_no) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(line_no, e.what());
    }
}

template <typename T, typename FromJson>
std::vector<T> load_jsonl(const std::filesystem::path& path, FromJson from_json) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::vector<T> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, line_no);
        try {
            out.push_back(from_json(j));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return out;
}

std::string jsonl_dump(const std::vector<json>& lines) {
    std::string out;
    for (const auto& j : lines) {
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace

json record_to_json(const QARecord& record) {
    json j{{"record_id", record.record_id},
           {"dimension", dimension_key(record.dimension)},
           {"video_ref", record.video_ref},
           {"question", record.question}};
    if (record.reference_answer.has_value()) {
        j["reference_answer"] = *record.reference_answer;
    }
    return j;
}

QARecord record_from_json(const json& j) {
    QARecord record;
    record.record_id = j.at("record_id").get<std::string>();
    record.dimension = parse_dimension(j.at("dimension").get<std::string>());
    record.video_ref = j.value("video_ref", "");
    record.question = j.at("question").get<std::string>();
    if (record.question.empty()) {
        throw Error("record '" + record.record_id + "' has an empty question");
    }
    if (j.contains("reference_answer")) {
        record.reference_answer = j.at("reference_answer").get<std::string>();
    }
    return record;
}

json response_to_json(const CandidateResponse& response) {
    return {{"record_id", response.record_id},
            {"candidate_id", response.candidate_id},
            {"text", response.text}};
}

CandidateResponse response_from_json(const json& j) {
    CandidateResponse response;
    response.record_id = j.at("record_id").get<std::string>();
    response.candidate_id = j.at("candidate_id").get<std::string>();
    response.text = j.at("text").get<std::string>();
    if (response.text.empty()) {
        throw Error("response for record '" + response.record_id + "' has empty text");
    }
    return response;
}

json review_to_json(const Review& review) {
    return {{"judge_id", review.judge_id},
            {"record_id", review.record_id},
            {"candidate_id", review.candidate_id},
            {"rating", review.rating.value()},
            {"rationale", review.rationale},
            {"mode", review_mode_name(review.mode)},
            {"attempts", review.attempts}};
}

Review review_from_json(const json& j) {
    Review review;
    review.judge_id = j.at("judge_id").get<std::string>();
    review.record_id = j.at("record_id").get<std::string>();
    review.candidate_id = j.at("candidate_id").get<std::string>();
    review.rating = Rating(j.at("rating").get<int>());
    review.rationale = j.value("rationale", "");
    review.mode = parse_review_mode(j.at("mode").get<std::string>());
    review.attempts = j.value("attempts", 1);
    return review;
}

json agreement_to_json(const AgreementScore& score) {
    json j{{"judge_id", score.judge_id},
           {"candidate_id", score.candidate_id},
           {"dimension", dimension_key(score.dimension)},
           {"kappa", score.kappa},
           {"n_items", score.n_items}};
    if (score.undefined) {
        j["undefined"] = true;
    }
    return j;
}

AgreementScore agreement_from_json(const json& j) {
    AgreementScore score;
    score.judge_id = j.at("judge_id").get<std::string>();
    score.candidate_id = j.at("candidate_id").get<std::string>();
    score.dimension = parse_dimension(j.at("dimension").get<std::string>());
    score.kappa = j.at("kappa").get<double>();
    score.n_items = j.at("n_items").get<std::int64_t>();
    score.undefined = j.value("undefined", false);
    return score;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw IoError("short write to '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename '" + tmp.string() + "' into place: " + ec.message());
    }
}

std::vector<QARecord> load_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::vector<QARecord> records;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, line_no);
        QARecord record;
        try {
            record = record_from_json(j);
        } catch (const UnknownDimensionError& e) {
            throw ParseError(line_no, e.what());
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        if (!seen.insert(record.record_id).second) {
            throw DuplicateRecordIdError(line_no, record.record_id);
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<CandidateResponse> load_responses(const std::filesystem::path& path) {
    return load_jsonl<CandidateResponse>(path, response_from_json);
}

std::vector<Review> load_reviews(const std::filesystem::path& path) {
    return load_jsonl<Review>(path, review_from_json);
}

std::vector<AgreementScore> load_agreement(const std::filesystem::path& path) {
    return load_jsonl<AgreementScore>(path, agreement_from_json);
}

void write_records(const std::filesystem::path& path, std::vector<QARecord> records) {
    std::sort(records.begin(), records.end(),
              [](const QARecord& a, const QARecord& b) { return a.record_id < b.record_id; });
    std::vector<json> lines;
    lines.reserve(records.size());
    for (const auto& r : records) lines.push_back(record_to_json(r));
    atomic_write(path, jsonl_dump(lines));
}

void write_responses(const std::filesystem::path& path,
                     std::vector<CandidateResponse> responses) {
    std::sort(responses.begin(), responses.end(),
              [](const CandidateResponse& a, const CandidateResponse& b) {
                  return std::tie(a.record_id, a.candidate_id) <
                         std::tie(b.record_id, b.candidate_id);
              });
    std::vector<json> lines;
    lines.reserve(responses.size());
    for (const auto& r : responses) lines.push_back(response_to_json(r));
    atomic_write(path, jsonl_dump(lines));
}

void write_reviews(const std::filesystem::path& path, std::vector<Review> reviews) {
    std::sort(reviews.begin(), reviews.end(), [](const Review& a, const Review& b) {
        return std::tie(a.record_id, a.candidate_id, a.judge_id, a.mode) <
               std::tie(b.record_id, b.candidate_id, b.judge_id, b.mode);
    });
    std::vector<json> lines;
    lines.reserve(reviews.size());
    for (const auto& r : reviews) lines.push_back(review_to_json(r));
    atomic_write(path, jsonl_dump(lines));
}

void write_agreement(const std::filesystem::path& path, std::vector<AgreementScore> scores) {
    std::sort(scores.begin(), scores.end(), [](const AgreementScore& a, const AgreementScore& b) {
        return std::tie(a.judge_id, a.candidate_id, a.dimension) <
               std::tie(b.judge_id, b.candidate_id, b.dimension);
    });
    std::vector<json> lines;
    lines.reserve(scores.size());
    for (const auto& s : scores) lines.push_back(agreement_to_json(s));
    atomic_write(path, jsonl_dump(lines));
}

void write_transcripts(const std::filesystem::path& path,
                       std::vector<DebateTranscript> transcripts) {
    std::sort(transcripts.begin(), transcripts.end(),
              [](const DebateTranscript& a, const DebateTranscript& b) {
                  return std::tie(a.record_id, a.candidate_id) <
                         std::tie(b.record_id, b.candidate_id);
              });
    std::vector<json> lines;
    for (const auto& t : transcripts) {
        for (const auto& turn : t.turns) {
            lines.push_back(json{{"kind", "turn"},
                                 {"record_id", t.record_id},
                                 {"candidate_id", t.candidate_id},
                                 {"round", turn.round},
                                 {"agent_id", turn.agent_id},
                                 {"text", turn.text}});
        }
        if (t.final_review.has_value()) {
            lines.push_back(json{{"kind", "final_review"},
                                 {"record_id", t.record_id},
                                 {"candidate_id", t.candidate_id},
                                 {"review", review_to_json(*t.final_review)}});
        }
    }
    atomic_write(path, jsonl_dump(lines));
}

std::vector<DebateTranscript> load_transcripts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::map<std::pair<std::string, std::string>, DebateTranscript> by_key;
    std::vector<std::pair<std::string, std::string>> order;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, line_no);
        try {
            const auto key = std::make_pair(j.at("record_id").get<std::string>(),
                                            j.at("candidate_id").get<std::string>());
            auto [it, inserted] = by_key.try_emplace(key);
            if (inserted) {
                it->second.record_id = key.first;
                it->second.candidate_id = key.second;
                order.push_back(key);
            }
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "turn") {
                it->second.turns.push_back(DebateTurn{j.at("round").get<int>(),
                                                      j.at("agent_id").get<std::string>(),
                                                      j.at("text").get<std::string>()});
            } else if (kind == "final_review") {
                it->second.final_review = review_from_json(j.at("review"));
            } else {
                throw ParseError(line_no, "unknown transcript line kind '" + kind + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    std::vector<DebateTranscript> out;
    out.reserve(order.size());
    for (const auto& key : order) out.push_back(std::move(by_key.at(key)));
    return out;
}

std::string config_digest(const json& effective_config) {
    return to_hex(fnv1a64(effective_config.dump()));
}

RunManifest make_manifest(const json& effective_config, std::uint64_t seed) {
    RunManifest manifest;
    manifest.config_digest = config_digest(effective_config);
    manifest.seed = seed;
    manifest.run_id =
        "run-" + to_hex(fnv1a64(manifest.config_digest + ":" + std::to_string(seed)));
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch) {
        manifest.created_at = std::strtoll(epoch, nullptr, 10);
    } else {
        manifest.created_at = static_cast<std::int64_t>(std::time(nullptr));
    }
    return manifest;
}

json manifest_to_json(const RunManifest& manifest) {
    return {{"run_id", manifest.run_id},
            {"created_at", manifest.created_at},
            {"config_digest", manifest.config_digest},
            {"seed", manifest.seed},
            {"stages", manifest.stages}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest manifest;
    manifest.run_id = j.at("run_id").get<std::string>();
    manifest.created_at = j.at("created_at").get<std::int64_t>();
    manifest.config_digest = j.at("config_digest").get<std::string>();
    manifest.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("stages")) manifest.stages.insert(s.get<std::string>());
    return manifest;
}

Workspace::Workspace(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

RunManifest Workspace::load_manifest() const {
    std::ifstream in(manifest_path());
    if (!in) {
        throw IoError("cannot open '" + manifest_path().string() + "'");
    }
    try {
        return manifest_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("manifest: ") + e.what());
    }
}

void Workspace::save_manifest(const RunManifest& manifest) const {
    atomic_write(manifest_path(), manifest_to_json(manifest).dump(2) + "\n");
}

void Workspace::merge_reviews(const std::vector<Review>& fresh,
                              const std::function<bool(const Review&)>& replaces) const {
    std::vector<Review> merged;
    if (std::filesystem::exists(reviews_path())) {
        for (auto& existing : load_reviews(reviews_path())) {
            if (!replaces(existing)) {
                merged.push_back(std::move(existing));
            }
        }
    }
    merged.insert(merged.end(), fresh.begin(), fresh.end());
    write_reviews(reviews_path(), std::move(merged));
}

}  // namespace judgekit
