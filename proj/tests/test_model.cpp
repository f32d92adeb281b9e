#include <doctest.h>

#include <cctype>
#include <limits>
#include <set>

#include "judgekit/model.hpp"

using namespace judgekit;

TEST_SUITE_BEGIN("model");

TEST_CASE("dimension set is exactly the eleven canonical keys") {
    const auto& dims = all_dimensions();
    REQUIRE(dims.size() == 11);

    std::set<std::string> keys;
    for (const auto d : dims) {
        const std::string key(dimension_key(d));
        CHECK(!key.empty());
        for (const char c : key) {
            CHECK((std::islower(static_cast<unsigned char>(c)) || c == '_'));
        }
        keys.insert(key);
    }
    CHECK(keys.size() == 11);
    CHECK(keys.count("multi_actions") == 1);
    CHECK(keys.count("nonexist_ne") == 1);
    CHECK(keys.count("cont_obj") == 1);
}

TEST_CASE("parse_dimension resolves canonical keys") {
    CHECK(parse_dimension("social_context") == VisualDimension::social_context);
    CHECK(parse_dimension("SOCIAL_CONTEXT ") == VisualDimension::social_context);
    CHECK(parse_dimension("  Time_Order\t") == VisualDimension::time_order);
    CHECK_THROWS_AS(parse_dimension("object_count"), UnknownDimensionError);
    CHECK_THROWS_AS(parse_dimension(""), UnknownDimensionError);
}

TEST_CASE("parse_dimension inverts dimension_key for every member") {
    for (const auto d : all_dimensions()) {
        CHECK(parse_dimension(dimension_key(d)) == d);
    }
}

TEST_CASE("rating enforces the 1..5 scale") {
    CHECK(Rating(1).value() == 1);
    CHECK(Rating(5).value() == 5);
    CHECK_THROWS_AS(Rating(0), OutOfRangeError);
    CHECK_THROWS_AS(Rating(6), OutOfRangeError);
    CHECK(Rating::kCategories == 5);
}

TEST_CASE("compare_candidates orders by score") {
    // 3.95 vs 3.81: the two leading judge means for the same candidate.
    CHECK(compare_candidates(3.95, 3.81) == ComparisonOutcome::a_wins);
    CHECK(compare_candidates(2.0, 2.0) == ComparisonOutcome::tie);
    CHECK(compare_candidates(1.0, 4.0) == ComparisonOutcome::b_wins);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(compare_candidates(nan, 1.0), NonFiniteScoreError);
    CHECK_THROWS_AS(compare_candidates(1.0, inf), NonFiniteScoreError);
}

TEST_CASE("selection rules validate at construction") {
    CHECK(SelectionRule::threshold(0.0).theta() == 0.0);
    CHECK(SelectionRule::threshold(1.0).theta() == 1.0);
    CHECK_THROWS_AS(SelectionRule::threshold(-0.1), OutOfRangeError);
    CHECK_THROWS_AS(SelectionRule::threshold(1.5), OutOfRangeError);

    CHECK(SelectionRule::top_k(1).k() == 1);
    CHECK_THROWS_AS(SelectionRule::top_k(0), OutOfRangeError);
}

TEST_CASE("selection rules parse the CLI forms") {
    const auto t = SelectionRule::parse("threshold=0.4");
    CHECK(t.kind() == SelectionRule::Kind::threshold);
    CHECK(t.theta() == doctest::Approx(0.4));

    const auto k = SelectionRule::parse("top_k=2");
    CHECK(k.kind() == SelectionRule::Kind::top_k);
    CHECK(k.k() == 2);

    CHECK_THROWS_AS(SelectionRule::parse("top_k"), Error);
    CHECK_THROWS_AS(SelectionRule::parse("best=3"), Error);
    CHECK_THROWS_AS(SelectionRule::parse("threshold=-0.2"), OutOfRangeError);
    CHECK_THROWS_AS(SelectionRule::parse("top_k=abc"), Error);
}

TEST_CASE("review modes round-trip through their names") {
    for (const auto mode :
         {ReviewMode::individual, ReviewMode::debate, ReviewMode::collective}) {
        CHECK(parse_review_mode(review_mode_name(mode)) == mode);
    }
    CHECK_THROWS_AS(parse_review_mode("chorus"), Error);
}

TEST_SUITE_END();
