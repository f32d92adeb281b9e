#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "judgekit/model.hpp"
#include "judgekit/rng.hpp"

namespace judgekit {

/// Candidate identity attached to all simulator output.
inline constexpr std::string_view kSimulatedCandidateId = "sim-candidate";

/// Rates round(q + Normal(0, sigma)).
struct CalibratedProfile {
    double sigma = 0.3;
};

/// Rates its mode with probability p_mode, else one of the two clamped
/// neighbors; models the over-positive judges that pile ratings on 4.
struct LenientProfile {
    Rating mode_rating{4};
    double p_mode = 0.9;
};

/// Rates round(q + delta + Normal(0, sigma)): a systematic shift.
struct BiasedProfile {
    double delta = 1.0;
    double sigma = 0.3;
};

struct JudgeProfile {
    std::string profile_id;
    std::variant<CalibratedProfile, LenientProfile, BiasedProfile> kind;
    std::uint64_t seed = 0;
};

JudgeProfile calibrated_profile(std::string profile_id, double sigma, std::uint64_t seed);
JudgeProfile lenient_profile(std::string profile_id, Rating mode_rating, double p_mode,
                             std::uint64_t seed);
JudgeProfile biased_profile(std::string profile_id, double delta, double sigma,
                            std::uint64_t seed);

/// The stock pool: one calibrated, one lenient, one biased rater, with
/// per-profile streams derived from `seed`.
std::vector<JudgeProfile> default_profiles(std::uint64_t seed);

/// Ground-truthed corpus. The reference reviews are a perfect oracle
/// (round of the latent quality) standing in for the reference-guided
/// debate baseline.
struct SyntheticCorpus {
    std::vector<QARecord> records;
    std::map<std::string, double> latent_quality;  // record_id -> [1, 5]
    std::vector<Review> reference_reviews;
};

/// Latent-to-rating map: half-away-from-zero rounding, clamped to 1..5.
Rating round_to_rating(double value);

/// One draw from the profile's rating distribution around `true_quality`.
/// `rng` must be the stream keyed by (profile.seed, record_id).
Rating sample_rating(const JudgeProfile& profile, double true_quality, DeterministicRng& rng);

/// Deterministic corpus: `records_per_dimension` records for each of the 11
/// dimensions, latent qualities uniform over [1, 5], templated question and
/// reference texts. Fully determined by `seed`.
SyntheticCorpus generate_corpus(int records_per_dimension, std::uint64_t seed);

/// One review per (profile, record). Streams are keyed per pair, so
/// evaluation order and parallelism cannot change outputs.
std::vector<Review> simulate_pool(const std::vector<JudgeProfile>& profiles,
                                  const SyntheticCorpus& corpus);

}  // namespace judgekit
