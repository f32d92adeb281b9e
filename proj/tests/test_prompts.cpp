#include <doctest.h>

#include "judgekit/prompts.hpp"

using namespace judgekit;

namespace {

QARecord sample_record() {
    QARecord record;
    record.record_id = "rec-7";
    record.dimension = VisualDimension::social_context;
    record.video_ref = "videos/crowd.mp4";
    record.question = "How did the crowd respond?";
    record.reference_answer = "SENTINEL-9f3a the crowd applauded.";
    return record;
}

CandidateResponse sample_response() {
    return {"rec-7", "cand-a", "The crowd cheered loudly."};
}

}  // namespace

TEST_SUITE_BEGIN("prompts");

TEST_CASE("judge prompt carries the record and the rating contract") {
    const auto bundle = render_judge_prompt(sample_record(), sample_response(), "judge-x");
    const std::string text = bundle.flattened();

    CHECK(text.find("Rating: <1-5>") != std::string::npos);
    CHECK(text.find("Social Context") != std::string::npos);
    CHECK(text.find("How did the crowd respond?") != std::string::npos);
    CHECK(text.find("videos/crowd.mp4") != std::string::npos);
    CHECK(text.find("The crowd cheered loudly.") != std::string::npos);

    CHECK(bundle.metadata.record_id == "rec-7");
    CHECK(bundle.metadata.candidate_id == "cand-a");
    CHECK(bundle.metadata.judge_id == "judge-x");
}

TEST_CASE("judge prompt never includes the reference answer") {
    const auto bundle = render_judge_prompt(sample_record(), sample_response(), "judge-x");
    CHECK(bundle.flattened().find("SENTINEL-9f3a") == std::string::npos);
}

TEST_CASE("rendering is deterministic") {
    const auto a = render_judge_prompt(sample_record(), sample_response(), "judge-x");
    const auto b = render_judge_prompt(sample_record(), sample_response(), "judge-x");
    CHECK(a == b);
    CHECK(a.flattened() == b.flattened());

    const auto c1 = render_candidate_prompt(sample_record(), "cand-a");
    const auto c2 = render_candidate_prompt(sample_record(), "cand-a");
    CHECK(c1 == c2);
}

TEST_CASE("parse_review extracts the verdict and strips its line") {
    const auto parsed = parse_review("The response hallucinates a dog.\nRating: 2");
    CHECK(parsed.rating.value() == 2);
    CHECK(parsed.rationale == "The response hallucinates a dog.");
}

TEST_CASE("parse_review error cases") {
    CHECK_THROWS_AS(parse_review("rating: 6"), OutOfRangeError);
    CHECK_THROWS_AS(parse_review("rating: 0"), OutOfRangeError);
    CHECK_THROWS_AS(parse_review("Rating: -2"), OutOfRangeError);
    CHECK_THROWS_AS(parse_review("I think it is fine."), NoRatingFoundError);
    CHECK_THROWS_AS(parse_review(""), NoRatingFoundError);
}

TEST_CASE("parse_review takes the last occurrence") {
    const auto parsed =
        parse_review("The candidate itself wrote 'Rating: 5 stars'.\nMy verdict:\nRating: 2");
    CHECK(parsed.rating.value() == 2);
    CHECK(parsed.rationale.find("Rating: 5 stars") != std::string::npos);

    // A later out-of-range verdict is an error, not a fallback to an
    // earlier in-range match.
    CHECK_THROWS_AS(parse_review("Rating: 4\nRating: 6"), OutOfRangeError);
}

TEST_CASE("parse_review is case- and whitespace-insensitive") {
    CHECK(parse_review("fine.\nRATING:3").rating.value() == 3);
    CHECK(parse_review("fine.\nrating :  5").rating.value() == 5);
}

TEST_CASE("synthetic replies round-trip every rating") {
    for (int n = 1; n <= 5; ++n) {
        const auto parsed =
            parse_review("Some considered rationale.\nRating: " + std::to_string(n));
        CHECK(parsed.rating.value() == n);
        CHECK(parsed.rationale == "Some considered rationale.");
    }
}

TEST_SUITE_END();
