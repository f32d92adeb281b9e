#include "judgekit/prompts.hpp"

#include <regex>
#include <sstream>

namespace judgekit {

std::string PromptBundle::flattened() const {
    std::string out = system;
    for (const auto& turn : turns) {
        out += '\n';
        out += turn.text;
    }
    return out;
}

namespace {

constexpr std::string_view kRatingContract =
    "Reply with your reasoning first, then end with a single final line of "
    "the exact form:\nRating: <1-5>";

}  // namespace

PromptBundle render_judge_prompt(const QARecord& record, const CandidateResponse& response,
                                 std::string_view judge_id) {
    PromptBundle bundle;
    bundle.system =
        "You are an impartial judge of video question answering. You will be "
        "shown a video reference, a question about it, and a candidate "
        "model's response. First analyze the video content and the question, "
        "then assess the accuracy and relevance of the response.";

    std::ostringstream user;
    user << "Visual dimension: " << dimension_display_name(record.dimension) << "\n"
         << "Video: " << record.video_ref << "\n"
         << "Question: " << record.question << "\n"
         << "Candidate response: " << response.text << "\n\n"
         << "Step 1 - Analyze: describe what the video and question require.\n"
         << "Step 2 - Judge: rate the candidate response from 1 (completely "
            "wrong) to 5 (perfectly accurate and relevant).\n"
         << kRatingContract;
    bundle.turns.push_back({"user", user.str()});
    bundle.metadata = {record.record_id, response.candidate_id, std::string(judge_id)};
    return bundle;
}

PromptBundle render_candidate_prompt(const QARecord& record, std::string_view candidate_id) {
    PromptBundle bundle;
    bundle.system =
        "You are a video understanding assistant. Answer the question about "
        "the referenced video concisely and accurately.";
    std::ostringstream user;
    user << "Video: " << record.video_ref << "\n"
         << "Question: " << record.question;
    bundle.turns.push_back({"user", user.str()});
    bundle.metadata = {record.record_id, std::string(candidate_id), ""};
    return bundle;
}

ParsedReview parse_review(std::string_view raw) {
    static const std::regex kRatingPattern(R"(rating\s*:\s*(-?\d+))", std::regex::icase);

    const std::string text(raw);
    std::smatch last;
    bool found = false;
    auto begin = std::sregex_iterator(text.begin(), text.end(), kRatingPattern);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        last = *it;
        found = true;
    }
    if (!found) {
        throw NoRatingFoundError(text);
    }

    const long value = std::stol(last[1].str());
    if (value < 1 || value > Rating::kCategories) {
        throw OutOfRangeError(static_cast<double>(value),
                              "judge reply rated " + std::to_string(value) + ", outside 1.." +
                                  std::to_string(Rating::kCategories));
    }

    // Drop the rating line; when the verdict shares a line with rationale
    // text ("Good. Rating: 4"), keep the leading text.
    const auto match_pos = static_cast<std::size_t>(last.position(0));
    const std::size_t newline_before = text.rfind('\n', match_pos);
    const std::size_t line_start = (newline_before == std::string::npos) ? 0 : newline_before + 1;
    std::size_t line_end = text.find('\n', match_pos);
    line_end = (line_end == std::string::npos) ? text.size() : line_end + 1;

    const std::string prefix = text.substr(line_start, match_pos - line_start);
    const bool prefix_blank = prefix.find_first_not_of(" \t\r") == std::string::npos;
    const std::size_t cut_from = prefix_blank ? line_start : match_pos;
    std::string rationale = text.substr(0, cut_from) + text.substr(line_end);

    const auto first = rationale.find_first_not_of(" \t\r\n");
    const auto last_ch = rationale.find_last_not_of(" \t\r\n");
    rationale = (first == std::string::npos) ? std::string()
                                             : rationale.substr(first, last_ch - first + 1);

    return ParsedReview{Rating(static_cast<int>(value)), std::move(rationale)};
}

std::string format_reminder_text() {
    return std::string(
        "Your previous reply did not contain a parseable verdict. ") +
        std::string(kRatingContract);
}

}  // namespace judgekit
