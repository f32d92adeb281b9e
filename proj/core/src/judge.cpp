#include "judgekit/judge.hpp"

namespace judgekit {

Review query_review(ChatGateway& gateway, PromptBundle prompt, ReviewMode mode) {
    const int max_attempts = gateway.config().max_retries + 1;
    int attempts = 0;
    while (attempts < max_attempts) {
        const std::string reply = gateway.complete(prompt);
        ++attempts;
        try {
            ParsedReview parsed = parse_review(reply);
            Review review;
            review.judge_id = prompt.metadata.judge_id;
            review.record_id = prompt.metadata.record_id;
            review.candidate_id = prompt.metadata.candidate_id;
            review.rating = parsed.rating;
            review.rationale = std::move(parsed.rationale);
            review.mode = mode;
            review.attempts = attempts;
            return review;
        } catch (const NoRatingFoundError&) {
        } catch (const OutOfRangeError&) {
        }
        prompt.turns.push_back({"assistant", reply});
        prompt.turns.push_back({"user", format_reminder_text()});
    }
    throw ExhaustedRetriesError(attempts);
}

Review judge_one(const std::string& judge_id, const QARecord& record,
                 const CandidateResponse& response, ChatGateway& gateway) {
    return query_review(gateway, render_judge_prompt(record, response, judge_id),
                        ReviewMode::individual);
}

}  // namespace judgekit
