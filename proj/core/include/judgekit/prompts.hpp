#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "judgekit/model.hpp"

namespace judgekit {

/// Bumped whenever any template below changes; echoed into run manifests so
/// stored reviews can be traced to the prompt wording that produced them.
inline constexpr std::string_view kPromptTemplateVersion = "prompts-v1";

struct PromptTurn {
    std::string role;  // "user" | "assistant"
    std::string text;

    bool operator==(const PromptTurn&) const = default;
};

struct PromptMetadata {
    std::string record_id;
    std::string candidate_id;
    std::string judge_id;

    bool operator==(const PromptMetadata&) const = default;
};

struct PromptBundle {
    std::string system;
    std::vector<PromptTurn> turns;
    PromptMetadata metadata;

    /// System text plus every turn, concatenated. Used for mock-gateway
    /// keying and for leak checks.
    std::string flattened() const;

    bool operator==(const PromptBundle&) const = default;
};

/// The analyze-then-judge instruction for one individual judge: examine the
/// video/question/response first, then emit a rationale and a final
/// "Rating: <1-5>" line. Pure function of its inputs: identical inputs give
/// byte-identical prompts. Individual prompts never include the reference
/// answer; only the reference-guided debate sees it.
PromptBundle render_judge_prompt(const QARecord& record, const CandidateResponse& response,
                                 std::string_view judge_id);

/// Prompt asking a candidate model to answer the record's question.
PromptBundle render_candidate_prompt(const QARecord& record, std::string_view candidate_id);

struct ParsedReview {
    Rating rating{1};
    std::string rationale;
};

/// Extracts the LAST "Rating: <integer>" occurrence (case-insensitive,
/// optional whitespace) and returns the remaining text, with the rating
/// line removed, as the rationale. Rationales often quote candidate text
/// containing stray "Rating:" strings; the final occurrence is the verdict.
/// Throws NoRatingFoundError when absent and OutOfRangeError for integers
/// outside 1..5 (no clamping; callers re-query instead).
ParsedReview parse_review(std::string_view raw);

/// Corrective turn appended before a re-query when a reply failed to parse.
std::string format_reminder_text();

}  // namespace judgekit
