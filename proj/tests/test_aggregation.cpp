#include <doctest.h>

#include <map>

#include "judgekit/aggregation.hpp"
#include "judgekit/simulator.hpp"

using namespace judgekit;

namespace {

ReliabilityMatrix matrix_for(VisualDimension dim,
                             std::initializer_list<std::pair<const char*, double>> kappas) {
    ReliabilityMatrix matrix;
    for (const auto& [judge, kappa] : kappas) {
        matrix.entries[{dim, judge}] = ReliabilityEntry{kappa, false};
    }
    return matrix;
}

Review rated(int value, std::string judge, std::string rationale = "",
             std::string record = "rec-1", std::string candidate = "cand-a") {
    Review r;
    r.judge_id = std::move(judge);
    r.record_id = std::move(record);
    r.candidate_id = std::move(candidate);
    r.rating = Rating(value);
    r.rationale = std::move(rationale);
    return r;
}

QARecord simple_record(std::string id = "rec-1",
                       VisualDimension dim = VisualDimension::multi_actions) {
    QARecord record;
    record.record_id = std::move(id);
    record.dimension = dim;
    record.video_ref = "videos/x.mp4";
    record.question = "What happens?";
    record.reference_answer = "Reference.";
    return record;
}

GatewayConfig fast_config() {
    GatewayConfig config;
    config.max_retries = 1;
    config.retry_backoff = std::chrono::milliseconds(1);
    return config;
}

class SingleGatewayProvider : public GatewayProvider {
public:
    explicit SingleGatewayProvider(ChatGateway& gateway) : gateway_(gateway) {}
    ChatGateway& gateway_for(const std::string&) override { return gateway_; }

private:
    ChatGateway& gateway_;
};

}  // namespace

TEST_SUITE_BEGIN("aggregation");

TEST_CASE("select_judges applies the gate") {
    const auto dim = VisualDimension::fine_action;
    const auto matrix = matrix_for(dim, {{"A", 0.5}, {"B", 0.2}, {"C", 0.4}});
    JudgeRoster roster{{"A", "B", "C"}, "final"};

    CHECK(select_judges(matrix, dim, roster, SelectionRule::top_k(2)) ==
          std::vector<std::string>{"A", "C"});
    CHECK(select_judges(matrix, dim, roster, SelectionRule::threshold(0.4)) ==
          std::vector<std::string>{"A", "C"});  // inclusive bound
    CHECK(select_judges(matrix, dim, roster, SelectionRule::threshold(0.9)).empty());
    CHECK(select_judges(matrix, dim, roster, SelectionRule::top_k(10)) ==
          std::vector<std::string>{"A", "C", "B"});  // ordered by descending kappa
}

TEST_CASE("select_judges breaks ties lexicographically and skips undefined") {
    const auto dim = VisualDimension::fine_action;
    auto matrix = matrix_for(dim, {{"zeta", 0.5}, {"alpha", 0.5}, {"mid", 0.3}});
    matrix.entries[{dim, "broken"}] = ReliabilityEntry{0.0, true};
    JudgeRoster roster{{"zeta", "alpha", "mid", "broken"}, "final"};

    CHECK(select_judges(matrix, dim, roster, SelectionRule::top_k(2)) ==
          std::vector<std::string>{"alpha", "zeta"});
    // undefined never selected even with a permissive gate
    CHECK(select_judges(matrix, dim, roster, SelectionRule::threshold(0.0)) ==
          std::vector<std::string>{"alpha", "zeta", "mid"});

    JudgeRoster unknown{{"alpha", "missing"}, "final"};
    CHECK_THROWS_AS(select_judges(matrix, dim, unknown, SelectionRule::top_k(1)),
                    MissingEntryError);
}

TEST_CASE("gate monotonicity") {
    const auto dim = VisualDimension::social_context;
    const auto matrix =
        matrix_for(dim, {{"a", 0.9}, {"b", 0.6}, {"c", 0.3}, {"d", 0.1}, {"e", -0.2}});
    JudgeRoster roster{{"a", "b", "c", "d", "e"}, "final"};

    std::size_t previous = roster.judges.size() + 1;
    for (const double theta : {0.0, 0.1, 0.3, 0.5, 0.7, 0.95}) {
        const auto selected = select_judges(matrix, dim, roster, SelectionRule::threshold(theta));
        CHECK(selected.size() <= previous);
        previous = selected.size();
    }

    std::vector<std::string> smaller;
    for (int k = 1; k <= 5; ++k) {
        const auto larger = select_judges(matrix, dim, roster, SelectionRule::top_k(k));
        REQUIRE(larger.size() >= smaller.size());
        for (std::size_t i = 0; i < smaller.size(); ++i) CHECK(larger[i] == smaller[i]);
        smaller = larger;
    }
}

TEST_CASE("top-k selection depends only on the kappa ordering") {
    const auto dim = VisualDimension::time_order;
    const auto base = matrix_for(dim, {{"a", 0.8}, {"b", 0.5}, {"c", 0.1}, {"d", -0.4}});
    auto squashed = base;
    for (auto& [key, entry] : squashed.entries) {
        entry.kappa = entry.kappa / 3.0 + 0.05;  // order-preserving
    }
    JudgeRoster roster{{"a", "b", "c", "d"}, "final"};
    for (int k = 1; k <= 4; ++k) {
        CHECK(select_judges(base, dim, roster, SelectionRule::top_k(k)) ==
              select_judges(squashed, dim, roster, SelectionRule::top_k(k)));
    }
}

TEST_CASE("build_reliability_matrix averages over candidates") {
    std::vector<AgreementScore> scores;
    scores.push_back({"j1", "c1", VisualDimension::fine_action, 0.6, 10, false});
    scores.push_back({"j1", "c2", VisualDimension::fine_action, 0.2, 10, false});
    scores.push_back({"j1", "c3", VisualDimension::fine_action, 0.0, 10, true});  // skipped
    scores.push_back({"j2", "c1", VisualDimension::fine_action, 0.0, 10, true});
    scores.push_back({"j2", "c2", VisualDimension::fine_action, 0.0, 10, true});

    const auto matrix = build_reliability_matrix(scores, "run-x");
    CHECK(matrix.provenance == "run-x");

    const auto* j1 = matrix.find(VisualDimension::fine_action, "j1");
    REQUIRE(j1 != nullptr);
    CHECK_FALSE(j1->undefined);
    CHECK(j1->kappa == doctest::Approx(0.4));

    const auto* j2 = matrix.find(VisualDimension::fine_action, "j2");
    REQUIRE(j2 != nullptr);
    CHECK(j2->undefined);

    CHECK(matrix.find(VisualDimension::time_order, "j1") == nullptr);
}

TEST_CASE("naive_ensemble rounds the mean half away from zero") {
    CHECK(naive_ensemble({rated(4, "a"), rated(4, "b"), rated(2, "c")}).value() == 3);
    CHECK(naive_ensemble({rated(4, "a")}).value() == 4);
    CHECK(naive_ensemble({rated(2, "a"), rated(3, "b")}).value() == 3);  // 2.5 rounds up
    CHECK_THROWS_AS(naive_ensemble({}), EmptyInputError);
}

TEST_CASE("naive_ensemble is permutation-invariant") {
    std::vector<Review> reviews = {rated(1, "a"), rated(5, "b"), rated(3, "c"), rated(4, "d")};
    const auto baseline = naive_ensemble(reviews);
    std::sort(reviews.begin(), reviews.end(),
              [](const Review& x, const Review& y) { return x.judge_id > y.judge_id; });
    CHECK(naive_ensemble(reviews) == baseline);
}

TEST_CASE("collective_review consults the panel") {
    ScriptedGateway gateway(fast_config());
    gateway.script_default({"Majority holds. Rating: 4"});

    const std::vector<Review> initial = {
        rated(4, "judge-one", "grounded"),
        rated(4, "judge-two", "matches"),
        rated(2, "judge-three", "doubtful"),
    };
    const auto outcome = collective_review(simple_record(), {"rec-1", "cand-a", "Answer."},
                                           initial, "final-judge", gateway);
    CHECK(outcome.review.rating.value() == 4);
    CHECK(outcome.review.mode == ReviewMode::collective);
    CHECK(outcome.review.judge_id == "final-judge");
    CHECK_FALSE(outcome.single_judge_fallback);
}

TEST_CASE("collective prompts anonymize the panel") {
    ScriptedGateway inner(fast_config());
    inner.script_default({"Rating: 3"});

    std::vector<PromptBundle> seen;
    class Capture : public ChatGateway {
    public:
        Capture(ChatGateway& inner, std::vector<PromptBundle>& out) : inner_(inner), out_(out) {}
        std::string complete(const PromptBundle& p) override {
            out_.push_back(p);
            return inner_.complete(p);
        }
        const GatewayConfig& config() const override { return inner_.config(); }

    private:
        ChatGateway& inner_;
        std::vector<PromptBundle>& out_;
    } capture(inner, seen);

    const std::vector<Review> initial = {
        rated(4, "judge-one", "grounded"),
        rated(4, "judge-two", "matches"),
        rated(2, "judge-three", "doubtful"),
    };
    collective_review(simple_record(), {"rec-1", "cand-a", "Answer."}, initial, "final-judge",
                      capture);

    REQUIRE(seen.size() == 1);
    const auto text = seen[0].flattened();
    CHECK(text.find("Reviewer 1") != std::string::npos);
    CHECK(text.find("Reviewer 2") != std::string::npos);
    CHECK(text.find("Reviewer 3") != std::string::npos);
    CHECK(text.find("judge-one") == std::string::npos);
    CHECK(text.find("judge-two") == std::string::npos);
    CHECK(text.find("judge-three") == std::string::npos);
    CHECK(text.find("grounded") != std::string::npos);  // rationales do appear
}

TEST_CASE("an empty panel degenerates to a flagged single-judge review") {
    ScriptedGateway gateway(fast_config());
    gateway.script_default({"Alone. Rating: 3"});
    const auto outcome =
        collective_review(simple_record(), {"rec-1", "cand-a", "Answer."}, {}, "final", gateway);
    CHECK(outcome.review.rating.value() == 3);
    CHECK(outcome.single_judge_fallback);
}

TEST_CASE("calibration_split is stratified and deterministic") {
    const auto corpus = generate_corpus(10, 77);
    const auto split = calibration_split(corpus.records, 0.3, 77);

    CHECK(split.calibration.size() + split.evaluation.size() == corpus.records.size());

    std::map<VisualDimension, int> calib_per_dim;
    for (const auto& r : split.calibration) ++calib_per_dim[r.dimension];
    CHECK(calib_per_dim.size() == 11);
    for (const auto& [dim, count] : calib_per_dim) CHECK(count == 3);  // round(0.3 * 10)

    const auto again = calibration_split(corpus.records, 0.3, 77);
    CHECK(again.calibration == split.calibration);
    CHECK(again.evaluation == split.evaluation);

    const auto reseeded = calibration_split(corpus.records, 0.3, 78);
    CHECK(reseeded.calibration != split.calibration);

    CHECK_THROWS_AS(calibration_split(corpus.records, 0.0, 1), OutOfRangeError);
    CHECK_THROWS_AS(calibration_split(corpus.records, 1.0, 1), OutOfRangeError);
}

TEST_CASE("run_pipeline produces the full review cardinality") {
    const auto corpus = generate_corpus(2, 7);
    std::vector<CandidateResponse> responses;
    for (const auto& r : corpus.records) {
        responses.push_back({r.record_id, "cand-a", "Answer for " + r.record_id});
    }

    GatewayConfig mock = fast_config();
    mock.endpoint_url = "mock://panel";
    ConfigGatewayProvider provider({}, mock);

    PipelineConfig config;
    config.roster = JudgeRoster{{"judge-1", "judge-2", "judge-3"}, "final-judge"};
    config.max_workers = 4;

    const auto artifacts = run_pipeline(corpus.records, responses, config, std::nullopt, provider);
    CHECK(artifacts.total_units == 22);
    CHECK(artifacts.individual_reviews.size() == 22 * 3);
    CHECK(artifacts.collective_reviews.size() == 22);
    CHECK(artifacts.failures.empty());
    CHECK(artifacts.judge_failures.empty());
    CHECK(artifacts.meets(1.0));

    // Deterministic regardless of worker interleaving.
    const auto again = run_pipeline(corpus.records, responses, config, std::nullopt, provider);
    CHECK(again.individual_reviews == artifacts.individual_reviews);
    CHECK(again.collective_reviews == artifacts.collective_reviews);
}

TEST_CASE("run_pipeline gates judges per dimension when a rule is set") {
    const auto corpus = generate_corpus(1, 3);
    std::vector<CandidateResponse> responses;
    for (const auto& r : corpus.records) {
        responses.push_back({r.record_id, "cand-a", "Answer."});
    }

    ReliabilityMatrix matrix;
    for (const auto dim : all_dimensions()) {
        matrix.entries[{dim, "judge-1"}] = ReliabilityEntry{0.8, false};
        matrix.entries[{dim, "judge-2"}] = ReliabilityEntry{0.1, false};
    }

    GatewayConfig mock = fast_config();
    mock.endpoint_url = "mock://panel";
    ConfigGatewayProvider provider({}, mock);

    PipelineConfig config;
    config.roster = JudgeRoster{{"judge-1", "judge-2"}, "final-judge"};
    config.rule = SelectionRule::top_k(1);

    const auto artifacts = run_pipeline(corpus.records, responses, config, matrix, provider);
    CHECK(artifacts.individual_reviews.size() == 11);  // one selected judge per record
    for (const auto& review : artifacts.individual_reviews) {
        CHECK(review.judge_id == "judge-1");
    }

    PipelineConfig bad = config;
    CHECK_THROWS_AS(run_pipeline(corpus.records, responses, bad, std::nullopt, provider), Error);
}

TEST_CASE("run_pipeline ledgers failed units and honors the completion fraction") {
    const auto corpus = generate_corpus(2, 7);
    std::vector<CandidateResponse> responses;
    for (const auto& r : corpus.records) {
        responses.push_back({r.record_id, "cand-a", "Answer for " + r.record_id});
    }

    // Every prompt mentioning the doomed record fails, judges and final alike.
    const std::string doomed = corpus.records.front().record_id;
    ScriptedGateway gateway(fast_config());
    gateway.script_error(doomed, GatewayErrorKind::transport);
    gateway.script_default({"Rating: 3"});
    SingleGatewayProvider provider(gateway);

    PipelineConfig config;
    config.roster = JudgeRoster{{"judge-1", "judge-2"}, "final-judge"};

    const auto artifacts = run_pipeline(corpus.records, responses, config, std::nullopt, provider);
    CHECK(artifacts.total_units == 22);
    REQUIRE(artifacts.failures.size() == 1);
    CHECK(artifacts.failures[0].record_id == doomed);
    CHECK(artifacts.failures[0].stage == "collective");
    CHECK(artifacts.judge_failures.size() == 2);  // both judges failed on the doomed record
    CHECK(artifacts.collective_reviews.size() == 21);
    CHECK(artifacts.meets(0.9));
    CHECK_FALSE(artifacts.meets(1.0));
}

TEST_SUITE_END();
