#include "judgekit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "judgekit/debate.hpp"

namespace judgekit {

JudgeProfile calibrated_profile(std::string profile_id, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw OutOfRangeError(sigma, "calibrated sigma must be >= 0");
    return {std::move(profile_id), CalibratedProfile{sigma}, seed};
}

JudgeProfile lenient_profile(std::string profile_id, Rating mode_rating, double p_mode,
                             std::uint64_t seed) {
    if (p_mode < 0.0 || p_mode > 1.0) throw OutOfRangeError(p_mode, "p_mode must be in [0, 1]");
    return {std::move(profile_id), LenientProfile{mode_rating, p_mode}, seed};
}

JudgeProfile biased_profile(std::string profile_id, double delta, double sigma,
                            std::uint64_t seed) {
    if (sigma < 0.0) throw OutOfRangeError(sigma, "biased sigma must be >= 0");
    return {std::move(profile_id), BiasedProfile{delta, sigma}, seed};
}

std::vector<JudgeProfile> default_profiles(std::uint64_t seed) {
    return {
        calibrated_profile("sim-calibrated", 0.3, seed ^ fnv1a64("sim-calibrated")),
        lenient_profile("sim-lenient", Rating(4), 0.9, seed ^ fnv1a64("sim-lenient")),
        biased_profile("sim-biased", 1.0, 0.3, seed ^ fnv1a64("sim-biased")),
    };
}

Rating round_to_rating(double value) {
    const double rounded = std::round(value);  // half away from zero
    return Rating(static_cast<int>(std::clamp(rounded, 1.0, 5.0)));
}

namespace {

struct Sampler {
    double quality;
    DeterministicRng& rng;

    Rating operator()(const CalibratedProfile& p) const {
        return round_to_rating(quality + p.sigma * rng.normal());
    }

    Rating operator()(const LenientProfile& p) const {
        if (rng.uniform() < p.p_mode) return p.mode_rating;
        const int lo = std::max(1, p.mode_rating.value() - 1);
        const int hi = std::min(Rating::kCategories, p.mode_rating.value() + 1);
        return Rating(rng.uniform() < 0.5 ? lo : hi);
    }

    Rating operator()(const BiasedProfile& p) const {
        return round_to_rating(quality + p.delta + p.sigma * rng.normal());
    }
};

}  // namespace

Rating sample_rating(const JudgeProfile& profile, double true_quality, DeterministicRng& rng) {
    return std::visit(Sampler{true_quality, rng}, profile.kind);
}

SyntheticCorpus generate_corpus(int records_per_dimension, std::uint64_t seed) {
    if (records_per_dimension < 1) {
        throw OutOfRangeError(records_per_dimension, "records_per_dimension must be >= 1");
    }
    SyntheticCorpus corpus;
    for (const auto dim : all_dimensions()) {
        for (int i = 1; i <= records_per_dimension; ++i) {
            QARecord record;
            std::ostringstream id;
            id << dimension_key(dim) << "-";
            id.width(3);
            id.fill('0');
            id << i;
            record.record_id = id.str();
            record.dimension = dim;
            record.video_ref = "sim://videos/" + record.record_id + ".mp4";
            record.question = "Regarding " + std::string(dimension_display_name(dim)) +
                              ": what happens in clip " + record.record_id + "?";
            record.reference_answer =
                "Reference description of the events in clip " + record.record_id + ".";

            auto rng = DeterministicRng::keyed(seed, "latent/" + record.record_id);
            const double quality = rng.uniform(1.0, 5.0);
            corpus.latent_quality.emplace(record.record_id, quality);

            Review reference;
            reference.judge_id = std::string(kDefaultDebateJudgeId);
            reference.record_id = record.record_id;
            reference.candidate_id = std::string(kSimulatedCandidateId);
            reference.rating = round_to_rating(quality);
            reference.rationale = "";
            reference.mode = ReviewMode::debate;
            corpus.reference_reviews.push_back(std::move(reference));

            corpus.records.push_back(std::move(record));
        }
    }
    return corpus;
}

std::vector<Review> simulate_pool(const std::vector<JudgeProfile>& profiles,
                                  const SyntheticCorpus& corpus) {
    std::vector<Review> reviews;
    reviews.reserve(profiles.size() * corpus.records.size());
    for (const auto& profile : profiles) {
        for (const auto& record : corpus.records) {
            auto rng = DeterministicRng::keyed(profile.seed, record.record_id);
            Review review;
            review.judge_id = profile.profile_id;
            review.record_id = record.record_id;
            review.candidate_id = std::string(kSimulatedCandidateId);
            review.rating =
                sample_rating(profile, corpus.latent_quality.at(record.record_id), rng);
            review.rationale = "";
            review.mode = ReviewMode::individual;
            reviews.push_back(std::move(review));
        }
    }
    return reviews;
}

}  // namespace judgekit
