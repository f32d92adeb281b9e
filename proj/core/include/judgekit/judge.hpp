#pragma once

#include "judgekit/gateway.hpp"
#include "judgekit/model.hpp"
#include "judgekit/prompts.hpp"

namespace judgekit {

/// Queries the gateway and parses the reply into a rating + rationale,
/// re-querying with an appended corrective instruction on parse failures
/// (up to the gateway's max_retries). Returns the review with `attempts`
/// set to the number of queries made. Throws ExhaustedRetriesError when
/// every attempt was unparseable; GatewayError passes through.
Review query_review(ChatGateway& gateway, PromptBundle prompt, ReviewMode mode);

/// One individual judge verdict for one (record, response) pair.
Review judge_one(const std::string& judge_id, const QARecord& record,
                 const CandidateResponse& response, ChatGateway& gateway);

}  // namespace judgekit
