#include <doctest.h>

#include "csv_reader.hpp"
#include "judgekit/reports.hpp"
#include "judgekit/simulator.hpp"

using namespace judgekit;
using csv_reader::parse_csv;

namespace {

Review rated(int value, std::string judge, std::string record, std::string candidate) {
    Review r;
    r.judge_id = std::move(judge);
    r.record_id = std::move(record);
    r.candidate_id = std::move(candidate);
    r.rating = Rating(value);
    return r;
}

}  // namespace

TEST_SUITE_BEGIN("reports");

TEST_CASE("csv_escape quotes only when needed") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("score table lays out (candidate, judge) rows over 11 dimension columns") {
    std::vector<QARecord> records;
    QARecord a;
    a.record_id = "r1";
    a.dimension = VisualDimension::cont_obj;
    a.question = "q";
    QARecord b = a;
    b.record_id = "r2";
    QARecord c = a;
    c.record_id = "r3";
    c.dimension = VisualDimension::time_order;
    records = {a, b, c};

    const std::vector<Review> reviews = {
        rated(4, "judge-j", "r1", "cand-c"),
        rated(4, "judge-j", "r2", "cand-c"),
        rated(3, "judge-j", "r3", "cand-c"),
        rated(5, "other-judge", "r1", "cand-c"),
    };

    const auto csv = emit_score_table(reviews, make_dimension_index(records));
    const auto rows = parse_csv(csv);
    REQUIRE(rows.size() == 3);  // header + 2 (candidate, judge) rows
    REQUIRE(rows[0].size() == 14);
    CHECK(rows[0][0] == "candidate");
    CHECK(rows[0][1] == "judge");
    CHECK(rows[0][2] == "multi_actions");
    CHECK(rows[0][12] == "visual_context");
    CHECK(rows[0][13] == "self_judging");

    // cont_obj mean 4.00 for judge-j, empty cells elsewhere
    const auto& judge_row = rows[1];
    CHECK(judge_row[0] == "cand-c");
    CHECK(judge_row[1] == "judge-j");
    const std::size_t cont_obj_col = 2 + 6;  // canonical position of cont_obj
    CHECK(judge_row[cont_obj_col] == "4.00");
    const std::size_t time_order_col = 2 + 3;
    CHECK(judge_row[time_order_col] == "3.00");
    CHECK(judge_row[2] == "");  // multi_actions: no reviews

    const auto& other_row = rows[2];
    CHECK(other_row[1] == "other-judge");
    CHECK(other_row[cont_obj_col] == "5.00");
}

TEST_CASE("self-judging rows are marked in both tables") {
    std::vector<QARecord> records(1);
    records[0].record_id = "r1";
    records[0].dimension = VisualDimension::multi_actions;
    records[0].question = "q";

    const std::vector<Review> reviews = {
        rated(4, "model-x", "r1", "model-x"),  // judging itself
        rated(3, "model-y", "r1", "model-x"),
    };
    const auto score_rows = parse_csv(emit_score_table(reviews, make_dimension_index(records)));
    REQUIRE(score_rows.size() == 3);
    CHECK(score_rows[1][1] == "model-x");
    CHECK(score_rows[1][13] == "yes");
    CHECK(score_rows[2][1] == "model-y");
    CHECK(score_rows[2][13] == "");

    std::vector<AgreementScore> scores;
    scores.push_back({"model-x", "model-x", VisualDimension::multi_actions, 0.5, 5, false});
    scores.push_back({"model-x", "model-z", VisualDimension::multi_actions, 0.4, 5, false});
    const auto agreement_rows = parse_csv(emit_agreement_table(scores));
    REQUIRE(agreement_rows.size() == 4);
    CHECK(agreement_rows[1][1] == "model-x");
    CHECK(agreement_rows[1][13] == "yes");
    CHECK(agreement_rows[2][13] == "");
    CHECK(agreement_rows[3][1] == "Average");
    CHECK(agreement_rows[3][13] == "");
}

TEST_CASE("agreement table scales kappa x100 and averages over candidates") {
    std::vector<AgreementScore> scores;
    scores.push_back({"judge-j", "cand-1", VisualDimension::social_context, 0.6038, 25, false});
    scores.push_back({"judge-j", "cand-2", VisualDimension::social_context, 0.10, 25, false});
    scores.push_back({"judge-j", "cand-1", VisualDimension::multi_actions, 0.10, 25, false});
    scores.push_back({"judge-j", "cand-2", VisualDimension::multi_actions, 0.20, 25, false});
    scores.push_back({"judge-j", "cand-1", VisualDimension::nonexist_e, 0.0, 25, true});
    scores.push_back({"judge-j", "cand-2", VisualDimension::nonexist_e, 0.0, 25, true});

    const auto csv = emit_agreement_table(scores);
    const auto rows = parse_csv(csv);
    REQUIRE(rows.size() == 4);  // header + cand-1 + cand-2 + Average
    REQUIRE(rows[0].size() == 14);

    const std::size_t social_col = 2 + 8;
    const std::size_t multi_col = 2;
    const std::size_t nonexist_e_col = 2 + 4;

    CHECK(rows[1][0] == "judge-j");
    CHECK(rows[1][1] == "cand-1");
    CHECK(rows[1][social_col] == "60.38");
    CHECK(rows[1][nonexist_e_col] == "NA");

    CHECK(rows[3][1] == "Average");
    CHECK(rows[3][multi_col] == "15.00");   // mean of 10.00 and 20.00
    CHECK(rows[3][social_col] == "35.19");  // mean of 60.38 and 10.00
    CHECK(rows[3][nonexist_e_col] == "NA"); // all undefined

    // Dimensions with no scores at all stay empty, including the average.
    CHECK(rows[1][2 + 1] == "");
    CHECK(rows[3][2 + 1] == "");
}

TEST_CASE("histograms count per judge with all five bins") {
    const std::vector<Review> reviews = {
        rated(4, "judge-j", "r1", "c"),
        rated(4, "judge-j", "r2", "c"),
        rated(4, "judge-j", "r3", "c"),
    };
    const auto json = emit_histograms(reviews);
    REQUIRE(json.contains("judge-j"));
    CHECK(json["judge-j"]["4"] == 3);
    CHECK(json["judge-j"]["1"] == 0);
    CHECK(json["judge-j"]["5"] == 0);

    CHECK(emit_histograms({}) == nlohmann::json::object());
}

TEST_CASE("a simulated lenient judge shows its modal bin") {
    const auto corpus = generate_corpus(10, 31);
    const auto reviews =
        simulate_pool({lenient_profile("sim-lenient", Rating(4), 0.9, 31)}, corpus);
    const auto json = emit_histograms(reviews);
    const auto& hist = json.at("sim-lenient");
    int max_bin = 1;
    for (int i = 2; i <= 5; ++i) {
        if (hist.at(std::to_string(i)).get<int>() >
            hist.at(std::to_string(max_bin)).get<int>()) {
            max_bin = i;
        }
    }
    CHECK(max_bin == 4);
}

TEST_CASE("emitted tables parse as CSV with uniform arity") {
    const auto corpus = generate_corpus(2, 7);
    const auto reviews = simulate_pool(default_profiles(7), corpus);
    const auto csv = emit_score_table(reviews, make_dimension_index(corpus.records));
    const auto rows = parse_csv(csv);
    REQUIRE(!rows.empty());
    for (const auto& row : rows) {
        CHECK(row.size() == rows[0].size());
    }
}

TEST_CASE("report emission is deterministic") {
    const auto corpus = generate_corpus(2, 7);
    auto reviews = simulate_pool(default_profiles(7), corpus);
    const auto dims = make_dimension_index(corpus.records);
    const auto first = emit_score_table(reviews, dims);
    std::reverse(reviews.begin(), reviews.end());
    CHECK(emit_score_table(reviews, dims) == first);
}

TEST_SUITE_END();
