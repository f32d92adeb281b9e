#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "judgekit/gateway.hpp"
#include "judgekit/model.hpp"

namespace judgekit {

/// Identity attached to debate-consensus reviews unless overridden.
inline constexpr std::string_view kDefaultDebateJudgeId = "agent-debate";

struct DebateConfig {
    int num_debaters = 2;  // >= 2
    int num_rounds = 2;    // >= 1
    GatewayConfig debater_gateway;
    GatewayConfig consolidator_gateway;
    std::string judge_id = std::string(kDefaultDebateJudgeId);
};

struct DebateTurn {
    int round = 1;
    std::string agent_id;  // "Agent 1".."Agent d"; debaters stay anonymous to each other
    std::string text;

    bool operator==(const DebateTurn&) const = default;
};

/// Full debate history for one (record, candidate) pair: num_debaters turns
/// per round, rounds contiguous from 1, then the consolidated verdict.
/// final_review is absent only on transcripts persisted mid-failure.
struct DebateTranscript {
    std::string record_id;
    std::string candidate_id;
    std::vector<DebateTurn> turns;
    std::optional<Review> final_review;

    bool operator==(const DebateTranscript&) const = default;
};

/// Invoked with the transcript (complete or partial) before run_debate
/// returns or rethrows, so progress survives gateway failures.
using TranscriptSink = std::function<void(const DebateTranscript&)>;

/// Consolidates a completed debate into the final debate-mode review. The
/// consolidator sees the full turn history, the reference answer, and the
/// rating format contract; its verdict is authoritative regardless of the
/// debaters' ratings. Throws ConsolidationFailedError once retries are
/// exhausted, EmptyInputError for an empty turn list.
Review consolidate(const std::vector<DebateTurn>& turns, const QARecord& record,
                   const CandidateResponse& response, ChatGateway& gateway,
                   std::string_view judge_id);

/// Runs the reference-guided debate: round 1 has every debater assess
/// (question, candidate response, reference answer) independently; later
/// rounds show all prior turns for revision; a consolidator then issues the
/// consensus review. Requires record.reference_answer. If consolidation
/// stays unparseable, falls back to the median of the debaters' last-round
/// ratings with ties broken toward the lower rating.
DebateTranscript run_debate(const QARecord& record, const CandidateResponse& response,
                            const DebateConfig& config, ChatGateway& debater_gateway,
                            ChatGateway& consolidator_gateway,
                            const TranscriptSink& sink = nullptr);

/// Convenience overload constructing gateways from the config.
DebateTranscript run_debate(const QARecord& record, const CandidateResponse& response,
                            const DebateConfig& config, const TranscriptSink& sink = nullptr);

}  // namespace judgekit
