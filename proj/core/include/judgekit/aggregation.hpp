#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "judgekit/gateway.hpp"
#include "judgekit/model.hpp"
#include "judgekit/stats.hpp"

namespace judgekit {

struct ReliabilityEntry {
    double kappa = 0.0;
    bool undefined = false;
};

/// Per-(dimension, judge) reliability, averaged over candidates with
/// undefined groups excluded. Judges whose every group is undefined are
/// kept, marked undefined; they are never selected.
struct ReliabilityMatrix {
    std::map<std::pair<VisualDimension, std::string>, ReliabilityEntry> entries;
    std::string provenance;  // run id of the calibration pass

    const ReliabilityEntry* find(VisualDimension d, const std::string& judge_id) const;
};

ReliabilityMatrix build_reliability_matrix(const std::vector<AgreementScore>& scores,
                                           std::string provenance);

/// Applies the reliability gate for one dimension. Threshold keeps judges
/// with kappa >= theta (the set-builder form is inclusive, whatever the
/// prose says); top-k keeps the k highest kappas with ties broken by
/// lexicographic judge_id. Output is ordered by descending kappa, then
/// judge_id. Throws MissingEntryError when the matrix lacks a roster judge.
std::vector<std::string> select_judges(const ReliabilityMatrix& matrix, VisualDimension dimension,
                                       const JudgeRoster& roster, const SelectionRule& rule);

/// Mean of the ratings, rounded half away from zero, clamped to 1..5.
/// Simulation-only aggregate; the production path consolidates through the
/// final judge instead. Throws EmptyInputError.
Rating naive_ensemble(const std::vector<Review>& initial_reviews);

struct CollectiveOutcome {
    Review review;
    /// Set when the selection was empty and the final judge assessed alone.
    bool single_judge_fallback = false;
};

/// Final assessment by the advanced judge: the prompt carries the record,
/// the response, and every initial review anonymized as "Reviewer 1..q"
/// (never the judges' model names). With zero initial reviews the final
/// judge degenerates to a flagged single-judge review.
CollectiveOutcome collective_review(const QARecord& record, const CandidateResponse& response,
                                    const std::vector<Review>& initial_reviews,
                                    const std::string& final_judge, ChatGateway& gateway);

/// Deterministic stratified split: within each dimension a seeded shuffle
/// sends ~`fraction` of the records (at least one) to the calibration side.
/// Reliability is estimated on held-out records, never the ones being
/// evaluated.
struct CorpusSplit {
    std::vector<QARecord> calibration;
    std::vector<QARecord> evaluation;
};

CorpusSplit calibration_split(const std::vector<QARecord>& records, double fraction,
                              std::uint64_t seed);

inline constexpr double kDefaultSelectionThreshold = 0.40;  // "moderate" lower bound
inline constexpr double kDefaultCalibrationFraction = 0.3;

struct PipelineConfig {
    JudgeRoster roster;
    /// Absent = use-all: every roster judge reviews every record.
    std::optional<SelectionRule> rule;
    double completion_fraction = 1.0;
    int max_workers = 4;
};

struct UnitFailure {
    std::string record_id;
    std::string candidate_id;
    std::string stage;  // "individual" | "collective"
    std::string error;
};

struct JudgeFailure {
    std::string record_id;
    std::string candidate_id;
    std::string judge_id;
    std::string error;
};

struct RunArtifacts {
    std::vector<Review> individual_reviews;
    std::vector<Review> collective_reviews;
    /// One entry per (record, candidate) unit whose final assessment could
    /// not be produced.
    std::vector<UnitFailure> failures;
    /// Individual-judge errors inside units that still completed.
    std::vector<JudgeFailure> judge_failures;
    std::int64_t single_judge_fallbacks = 0;
    std::int64_t total_units = 0;

    std::int64_t completed_units() const {
        return total_units - static_cast<std::int64_t>(failures.size());
    }
    bool meets(double completion_fraction) const;
};

/// Full evaluation pass: per (record, response) unit, individual reviews
/// from the judges selected for the record's dimension, then the collective
/// review by the final judge over those initial reviews. Units run
/// concurrently up to max_workers; results come back canonically sorted.
/// A unit fails only if its collective review fails; per-judge errors are
/// recorded and the collective proceeds with the surviving reviews.
RunArtifacts run_pipeline(const std::vector<QARecord>& dataset,
                          const std::vector<CandidateResponse>& responses,
                          const PipelineConfig& config,
                          const std::optional<ReliabilityMatrix>& matrix,
                          GatewayProvider& gateways);

}  // namespace judgekit
