#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "judgekit/errors.hpp"

namespace judgekit {

/// The eleven visual dimensions a video-question record belongs to.
/// Enumeration order is canonical: report columns and per-dimension
/// iteration follow it everywhere.
enum class VisualDimension {
    multi_actions,
    fine_action,
    partial_actions,
    time_order,
    nonexist_e,
    nonexist_ne,
    cont_obj,
    unusual_activities,
    social_context,
    emotional_context,
    visual_context,
};

inline constexpr int kNumDimensions = 11;

const std::array<VisualDimension, kNumDimensions>& all_dimensions();

/// Canonical identifier, e.g. "social_context". Stable across serialization.
std::string_view dimension_key(VisualDimension d);

/// Human label, e.g. "Social Context".
std::string_view dimension_display_name(VisualDimension d);

/// Case-insensitive, whitespace-trimmed lookup by canonical key.
/// Throws UnknownDimensionError for non-members.
VisualDimension parse_dimension(std::string_view key);

/// One video-question pair. `video_ref` is an opaque URI/path; judgekit
/// never dereferences it.
struct QARecord {
    std::string record_id;
    VisualDimension dimension = VisualDimension::multi_actions;
    std::string video_ref;
    std::string question;
    std::optional<std::string> reference_answer;

    bool operator==(const QARecord&) const = default;
};

/// A candidate model's answer to one record.
struct CandidateResponse {
    std::string record_id;
    std::string candidate_id;
    std::string text;

    bool operator==(const CandidateResponse&) const = default;
};

/// An ordinal rating on the fixed 1..5 scale. The category count is a
/// constant, not a parameter: mixing scales would silently corrupt kappa.
class Rating {
public:
    static constexpr int kCategories = 5;

    explicit Rating(int value) : value_(value) {
        if (value < 1 || value > kCategories) {
            throw OutOfRangeError(value, "rating " + std::to_string(value) +
                                             " outside 1.." + std::to_string(kCategories));
        }
    }

    int value() const { return value_; }

    bool operator==(const Rating&) const = default;
    auto operator<=>(const Rating&) const = default;

private:
    int value_;
};

enum class ReviewMode { individual, debate, collective };

std::string_view review_mode_name(ReviewMode m);
ReviewMode parse_review_mode(std::string_view name);

/// One judge verdict for one (record, candidate) pair.
/// Debate-mode reviews correspond to a stored DebateTranscript keyed by the
/// same (record_id, candidate_id). Empty rationales are expected only from
/// the simulator.
struct Review {
    std::string judge_id;
    std::string record_id;
    std::string candidate_id;
    Rating rating{1};
    std::string rationale;
    ReviewMode mode = ReviewMode::individual;
    int attempts = 1;

    bool operator==(const Review&) const = default;
};

/// The judge pool plus the final (collective-stage) judge. The final judge
/// need not be a pool member; a judge may also appear as a candidate.
struct JudgeRoster {
    std::vector<std::string> judges;
    std::string final_judge;
};

/// Reliability gate: keep judges with kappa >= theta, or the top-k by kappa.
/// Negative thresholds are rejected: kappa can be negative, but a negative
/// reliability bar is meaningless as a gate.
class SelectionRule {
public:
    enum class Kind { threshold, top_k };

    static SelectionRule threshold(double theta);
    static SelectionRule top_k(int k);

    /// Parses "threshold=0.4" or "top_k=2".
    static SelectionRule parse(std::string_view text);

    Kind kind() const { return kind_; }
    double theta() const { return theta_; }
    int k() const { return k_; }

    std::string to_string() const;

private:
    SelectionRule(Kind kind, double theta, int k) : kind_(kind), theta_(theta), k_(k) {}

    Kind kind_;
    double theta_ = 0.0;
    int k_ = 0;
};

enum class ComparisonOutcome { a_wins, b_wins, tie };

/// Pairwise comparison derived from mean scores: the higher score wins.
/// Throws NonFiniteScoreError unless both scores are finite.
ComparisonOutcome compare_candidates(double score_a, double score_b);

}  // namespace judgekit
