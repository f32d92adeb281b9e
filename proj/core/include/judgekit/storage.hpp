#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgekit/debate.hpp"
#include "judgekit/model.hpp"
#include "judgekit/stats.hpp"

namespace judgekit {

// JSON conversions for the external JSONL schemas. Object keys serialize
// sorted, so encoded bytes are stable.
nlohmann::json record_to_json(const QARecord& record);
QARecord record_from_json(const nlohmann::json& j);

nlohmann::json response_to_json(const CandidateResponse& response);
CandidateResponse response_from_json(const nlohmann::json& j);

nlohmann::json review_to_json(const Review& review);
Review review_from_json(const nlohmann::json& j);

nlohmann::json agreement_to_json(const AgreementScore& score);
AgreementScore agreement_from_json(const nlohmann::json& j);

/// Writes content to a temporary file in the target directory and renames
/// it into place, so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Loads one QARecord per JSONL line. Errors carry line numbers; duplicate
/// record_ids and unknown dimension keys are rejected.
std::vector<QARecord> load_records(const std::filesystem::path& path);

std::vector<CandidateResponse> load_responses(const std::filesystem::path& path);
std::vector<Review> load_reviews(const std::filesystem::path& path);
std::vector<AgreementScore> load_agreement(const std::filesystem::path& path);

void write_records(const std::filesystem::path& path, std::vector<QARecord> records);
void write_responses(const std::filesystem::path& path, std::vector<CandidateResponse> responses);

/// Canonically sorted by (record_id, candidate_id, judge_id, mode) and
/// written atomically: the same review set always produces the same bytes.
void write_reviews(const std::filesystem::path& path, std::vector<Review> reviews);

void write_agreement(const std::filesystem::path& path, std::vector<AgreementScore> scores);

/// One line per turn plus a final-review line per transcript.
void write_transcripts(const std::filesystem::path& path,
                       std::vector<DebateTranscript> transcripts);
std::vector<DebateTranscript> load_transcripts(const std::filesystem::path& path);

/// Identity and progress of one run. created_at honors SOURCE_DATE_EPOCH
/// (the reproducible-build convention) so that seeded runs can be
/// byte-identical; without it, wall-clock time is recorded.
struct RunManifest {
    std::string run_id;
    std::int64_t created_at = 0;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::set<std::string> stages;

    bool stage_done(const std::string& stage) const { return stages.count(stage) > 0; }
};

/// Digest of the canonically serialized effective configuration; stable
/// across platforms.
std::string config_digest(const nlohmann::json& effective_config);

RunManifest make_manifest(const nlohmann::json& effective_config, std::uint64_t seed);

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

/// One run's directory: records, responses, reviews, transcripts,
/// agreement scores, failure ledger, manifest, and emitted reports.
/// Single-writer; all writes go through atomic renames.
class Workspace {
public:
    explicit Workspace(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path records_path() const { return root_ / "records.jsonl"; }
    std::filesystem::path responses_path() const { return root_ / "responses.jsonl"; }
    std::filesystem::path reviews_path() const { return root_ / "reviews.jsonl"; }
    std::filesystem::path transcripts_path() const { return root_ / "transcripts.jsonl"; }
    std::filesystem::path agreement_path() const { return root_ / "agreement.jsonl"; }
    std::filesystem::path latent_path() const { return root_ / "latent_quality.json"; }
    std::filesystem::path selection_path() const { return root_ / "selection.json"; }
    std::filesystem::path failures_path() const { return root_ / "failures.json"; }
    std::filesystem::path manifest_path() const { return root_ / "manifest.json"; }
    std::filesystem::path reports_dir() const { return root_ / "reports"; }

    bool has_manifest() const { return std::filesystem::exists(manifest_path()); }
    RunManifest load_manifest() const;
    void save_manifest(const RunManifest& manifest) const;

    /// Replaces the stored reviews matching `replaces` (a stage re-emitting
    /// its output) and merges in the new ones; the merged set is rewritten
    /// canonically, so re-running a stage is byte-stable.
    void merge_reviews(const std::vector<Review>& fresh,
                       const std::function<bool(const Review&)>& replaces) const;

private:
    std::filesystem::path root_;
};

}  // namespace judgekit
