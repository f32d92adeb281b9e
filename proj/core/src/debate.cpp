#include "judgekit/debate.hpp"

#include <algorithm>
#include <future>
#include <sstream>

#include "judgekit/judge.hpp"

namespace judgekit {

namespace {

std::string agent_name(int index) { return "Agent " + std::to_string(index + 1); }

std::string shared_context(const QARecord& record, const CandidateResponse& response) {
    std::ostringstream out;
    out << "Visual dimension: " << dimension_display_name(record.dimension) << "\n"
        << "Video: " << record.video_ref << "\n"
        << "Question: " << record.question << "\n"
        << "Candidate response: " << response.text << "\n"
        << "Reference answer: " << record.reference_answer.value_or("") << "\n";
    return out.str();
}

std::string history_block(const std::vector<DebateTurn>& turns) {
    std::ostringstream out;
    out << "Debate so far:\n";
    for (const auto& turn : turns) {
        out << "[Round " << turn.round << "] " << turn.agent_id << ": " << turn.text << "\n";
    }
    return out.str();
}

PromptBundle debater_prompt(const QARecord& record, const CandidateResponse& response,
                            int agent_index, int round, const std::vector<DebateTurn>& history,
                            std::string_view judge_id) {
    PromptBundle bundle;
    bundle.system = "You are " + agent_name(agent_index) +
                    ", one of several independent reviewers grading a model's answer to a video "
                    "question against the provided reference answer. Be critical: credit only "
                    "what the reference supports.";
    std::ostringstream user;
    user << shared_context(record, response) << "\n";
    if (round == 1) {
        user << "Give your independent assessment of the candidate response.\n";
    } else {
        user << history_block(history) << "\n"
             << "Round " << round
             << ": considering the other agents' arguments, revise or defend your assessment.\n";
    }
    user << "Reply with your reasoning first, then end with a single final line of the exact "
            "form:\nRating: <1-5>";
    bundle.turns.push_back({"user", user.str()});
    bundle.metadata = {record.record_id, response.candidate_id, std::string(judge_id)};
    return bundle;
}

PromptBundle consolidator_prompt(const std::vector<DebateTurn>& turns, const QARecord& record,
                                 const CandidateResponse& response, std::string_view judge_id) {
    PromptBundle bundle;
    bundle.system =
        "You consolidate a finished reviewer debate into one consensus verdict. Weigh the "
        "arguments against the reference answer and decide the final rating yourself.";
    std::ostringstream user;
    user << shared_context(record, response) << "\n"
         << history_block(turns) << "\n"
         << "State the consensus reasoning, then end with a single final line of the exact "
            "form:\nRating: <1-5>";
    bundle.turns.push_back({"user", user.str()});
    bundle.metadata = {record.record_id, response.candidate_id, std::string(judge_id)};
    return bundle;
}

/// Median with even-count ties resolved toward the lower rating; debate is
/// the critical baseline, so ambiguity resolves down.
Rating median_low(std::vector<int> values) {
    std::sort(values.begin(), values.end());
    return Rating(values[(values.size() - 1) / 2]);
}

}  // namespace

Review consolidate(const std::vector<DebateTurn>& turns, const QARecord& record,
                   const CandidateResponse& response, ChatGateway& gateway,
                   std::string_view judge_id) {
    if (turns.empty()) {
        throw EmptyInputError("cannot consolidate a debate with no turns");
    }
    try {
        return query_review(gateway, consolidator_prompt(turns, record, response, judge_id),
                            ReviewMode::debate);
    } catch (const ExhaustedRetriesError& e) {
        throw ConsolidationFailedError(e.what());
    }
}

DebateTranscript run_debate(const QARecord& record, const CandidateResponse& response,
                            const DebateConfig& config, ChatGateway& debater_gateway,
                            ChatGateway& consolidator_gateway, const TranscriptSink& sink) {
    if (!record.reference_answer.has_value() || record.reference_answer->empty()) {
        throw MissingReferenceError(record.record_id);
    }

    DebateTranscript transcript;
    transcript.record_id = record.record_id;
    transcript.candidate_id = response.candidate_id;

    const auto persist_partial = [&] {
        if (sink) sink(transcript);
    };

    for (int round = 1; round <= config.num_rounds; ++round) {
        // Rounds are a strict barrier; turns within one run concurrently.
        std::vector<std::future<std::string>> replies;
        replies.reserve(static_cast<std::size_t>(config.num_debaters));
        for (int agent = 0; agent < config.num_debaters; ++agent) {
            replies.push_back(std::async(std::launch::async, [&, agent] {
                return debater_gateway.complete(debater_prompt(
                    record, response, agent, round, transcript.turns, config.judge_id));
            }));
        }
        std::vector<DebateTurn> round_turns;
        std::exception_ptr failure;
        for (int agent = 0; agent < config.num_debaters; ++agent) {
            try {
                std::string text = replies[static_cast<std::size_t>(agent)].get();
                round_turns.push_back(DebateTurn{round, agent_name(agent), std::move(text)});
            } catch (...) {
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) {
            transcript.turns.insert(transcript.turns.end(), round_turns.begin(),
                                    round_turns.end());
            persist_partial();
            std::rethrow_exception(failure);
        }
        transcript.turns.insert(transcript.turns.end(), round_turns.begin(), round_turns.end());
    }

    try {
        transcript.final_review =
            consolidate(transcript.turns, record, response, consolidator_gateway,
                        config.judge_id);
    } catch (const ConsolidationFailedError&) {
        // Fall back to the debaters' own last-round verdicts.
        std::vector<int> last_round_ratings;
        for (const auto& turn : transcript.turns) {
            if (turn.round != config.num_rounds) continue;
            try {
                last_round_ratings.push_back(parse_review(turn.text).rating.value());
            } catch (const Error&) {
            }
        }
        if (last_round_ratings.empty()) {
            persist_partial();
            throw;
        }
        Review fallback;
        fallback.judge_id = config.judge_id;
        fallback.record_id = record.record_id;
        fallback.candidate_id = response.candidate_id;
        fallback.rating = median_low(std::move(last_round_ratings));
        fallback.rationale = "Consolidation unparseable; median of final-round debater ratings.";
        fallback.mode = ReviewMode::debate;
        fallback.attempts = consolidator_gateway.config().max_retries + 1;
        transcript.final_review = fallback;
    } catch (const GatewayError&) {
        persist_partial();
        throw;
    }

    persist_partial();
    return transcript;
}

DebateTranscript run_debate(const QARecord& record, const CandidateResponse& response,
                            const DebateConfig& config, const TranscriptSink& sink) {
    auto debater = make_gateway(config.debater_gateway);
    auto consolidator = make_gateway(config.consolidator_gateway);
    return run_debate(record, response, config, *debater, *consolidator, sink);
}

}  // namespace judgekit
