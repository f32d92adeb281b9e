#include <doctest.h>

#include <map>

#include "judgekit/simulator.hpp"
#include "judgekit/stats.hpp"

using namespace judgekit;

TEST_SUITE_BEGIN("simulator");

TEST_CASE("round_to_rating rounds half away from zero and clamps") {
    CHECK(round_to_rating(3.0).value() == 3);
    CHECK(round_to_rating(3.5).value() == 4);
    CHECK(round_to_rating(2.49).value() == 2);
    CHECK(round_to_rating(0.2).value() == 1);
    CHECK(round_to_rating(6.7).value() == 5);
}

TEST_CASE("a fully lenient profile always rates its mode") {
    const auto profile = lenient_profile("len", Rating(4), 1.0, 99);
    auto rng = DeterministicRng::keyed(profile.seed, "any");
    for (int i = 0; i < 200; ++i) {
        CHECK(sample_rating(profile, 1.0 + (i % 5), rng).value() == 4);
    }
}

TEST_CASE("lenient misses land on the clamped neighbors") {
    const auto profile = lenient_profile("len", Rating(5), 0.0, 7);
    auto rng = DeterministicRng::keyed(profile.seed, "any");
    for (int i = 0; i < 200; ++i) {
        const int v = sample_rating(profile, 3.0, rng).value();
        CHECK((v == 4 || v == 5));  // 6 clamps back to 5
    }
}

TEST_CASE("a noiseless calibrated profile reproduces the latent quality") {
    const auto profile = calibrated_profile("cal", 0.0, 42);
    auto rng = DeterministicRng::keyed(profile.seed, "r");
    CHECK(sample_rating(profile, 3.0, rng).value() == 3);
    CHECK(sample_rating(profile, 1.2, rng).value() == 1);
    CHECK(sample_rating(profile, 4.6, rng).value() == 5);
}

TEST_CASE("calibrated noise is centered on the latent quality") {
    const auto profile = calibrated_profile("cal", 0.5, 11);
    auto rng = DeterministicRng::keyed(profile.seed, "mc");
    double sum = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        sum += sample_rating(profile, 3.0, rng).value();
    }
    const double mean = sum / draws;
    CHECK(mean >= 2.85);
    CHECK(mean <= 3.15);
}

TEST_CASE("a lenient profile at p_mode 0.9 concentrates 1000 draws on its mode") {
    const auto profile = lenient_profile("len", Rating(4), 0.9, 5);
    auto rng = DeterministicRng::keyed(profile.seed, "hist");
    int at_mode = 0;
    for (int i = 0; i < 1000; ++i) {
        if (sample_rating(profile, 2.0, rng).value() == 4) ++at_mode;
    }
    CHECK(at_mode >= 850);
    CHECK(at_mode <= 950);
}

TEST_CASE("biased profiles shift systematically") {
    const auto profile = biased_profile("bia", 1.0, 0.0, 3);
    auto rng = DeterministicRng::keyed(profile.seed, "r");
    CHECK(sample_rating(profile, 2.0, rng).value() == 3);
    CHECK(sample_rating(profile, 4.6, rng).value() == 5);  // clamped
}

TEST_CASE("profile parameters are validated") {
    CHECK_THROWS_AS(calibrated_profile("x", -0.1, 0), OutOfRangeError);
    CHECK_THROWS_AS(lenient_profile("x", Rating(4), 1.2, 0), OutOfRangeError);
    CHECK_THROWS_AS(biased_profile("x", 1.0, -2.0, 0), OutOfRangeError);
}

TEST_CASE("generate_corpus covers the dimensions deterministically") {
    const auto corpus = generate_corpus(2, 7);
    CHECK(corpus.records.size() == 22);
    CHECK(corpus.reference_reviews.size() == 22);
    CHECK(corpus.latent_quality.size() == 22);

    std::map<VisualDimension, int> per_dim;
    for (const auto& r : corpus.records) ++per_dim[r.dimension];
    CHECK(per_dim.size() == 11);
    for (const auto& [dim, count] : per_dim) CHECK(count == 2);

    for (const auto& r : corpus.records) {
        CHECK(r.reference_answer.has_value());
        CHECK(!r.question.empty());
        const double q = corpus.latent_quality.at(r.record_id);
        CHECK(q >= 1.0);
        CHECK(q <= 5.0);
    }

    const auto again = generate_corpus(2, 7);
    CHECK(again.records == corpus.records);
    CHECK(again.latent_quality == corpus.latent_quality);
    CHECK(again.reference_reviews == corpus.reference_reviews);

    const auto other_seed = generate_corpus(2, 8);
    CHECK(other_seed.latent_quality != corpus.latent_quality);
}

TEST_CASE("a single-record-per-dimension corpus hits all 11 dimensions once") {
    const auto corpus = generate_corpus(1, 123);
    CHECK(corpus.records.size() == 11);
    std::map<VisualDimension, int> per_dim;
    for (const auto& r : corpus.records) ++per_dim[r.dimension];
    CHECK(per_dim.size() == 11);
    CHECK_THROWS_AS(generate_corpus(0, 1), OutOfRangeError);
}

TEST_CASE("reference reviews are the rounded latent quality") {
    const auto corpus = generate_corpus(3, 21);
    for (const auto& review : corpus.reference_reviews) {
        CHECK(review.rating == round_to_rating(corpus.latent_quality.at(review.record_id)));
        CHECK(review.mode == ReviewMode::debate);
        CHECK(review.judge_id == "agent-debate");
    }
}

TEST_CASE("simulate_pool emits one review per (profile, record)") {
    const auto corpus = generate_corpus(2, 7);
    const auto profiles = default_profiles(7);
    REQUIRE(profiles.size() == 3);

    const auto reviews = simulate_pool(profiles, corpus);
    CHECK(reviews.size() == 66);
    for (const auto& r : reviews) {
        CHECK(r.mode == ReviewMode::individual);
        CHECK(r.candidate_id == std::string(kSimulatedCandidateId));
        CHECK(r.rationale.empty());
    }

    // Pure function of (profiles, corpus).
    CHECK(simulate_pool(profiles, corpus) == reviews);
}

TEST_CASE("a noiseless calibrated pool agrees perfectly with the reference") {
    const auto corpus = generate_corpus(4, 19);
    const auto reviews = simulate_pool({calibrated_profile("perfect", 0.0, 19)}, corpus);
    const auto report = agreement_by_group(reviews, corpus.reference_reviews,
                                           make_dimension_index(corpus.records));
    for (const auto& score : report.scores) {
        if (!score.undefined) {
            CHECK(score.kappa == 1.0);
        }
    }
}

TEST_CASE("reliability orders calibrated above biased above lenient in every seed") {
    for (std::uint64_t seed = 101; seed <= 110; ++seed) {
        const auto corpus = generate_corpus(46, seed);  // ~500 records
        const auto dims = make_dimension_index(corpus.records);

        const auto pooled_kappa = [&](const JudgeProfile& profile) {
            const auto reviews = simulate_pool({profile}, corpus);
            std::vector<RatingPair> pairs;
            for (std::size_t i = 0; i < reviews.size(); ++i) {
                pairs.emplace_back(reviews[i].rating, corpus.reference_reviews[i].rating);
            }
            return weighted_kappa(build_contingency(pairs));
        };

        const double calibrated = pooled_kappa(calibrated_profile("cal", 0.3, seed + 1));
        const double biased = pooled_kappa(biased_profile("bia", 1.0, 0.3, seed + 2));
        const double lenient = pooled_kappa(lenient_profile("len", Rating(4), 0.9, seed + 3));

        CHECK(calibrated > biased);
        CHECK(biased > lenient);
    }
}

TEST_SUITE_END();
