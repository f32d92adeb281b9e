#include "judgekit/aggregation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "judgekit/judge.hpp"
#include "judgekit/rng.hpp"
#include "judgekit/simulator.hpp"

namespace judgekit {

const ReliabilityEntry* ReliabilityMatrix::find(VisualDimension d,
                                                const std::string& judge_id) const {
    const auto it = entries.find({d, judge_id});
    return it == entries.end() ? nullptr : &it->second;
}

ReliabilityMatrix build_reliability_matrix(const std::vector<AgreementScore>& scores,
                                           std::string provenance) {
    struct Acc {
        double sum = 0.0;
        int defined = 0;
        int total = 0;
    };
    std::map<std::pair<VisualDimension, std::string>, Acc> acc;
    for (const auto& s : scores) {
        auto& a = acc[{s.dimension, s.judge_id}];
        ++a.total;
        if (!s.undefined) {
            a.sum += s.kappa;
            ++a.defined;
        }
    }
    ReliabilityMatrix matrix;
    matrix.provenance = std::move(provenance);
    for (const auto& [key, a] : acc) {
        ReliabilityEntry entry;
        if (a.defined > 0) {
            entry.kappa = a.sum / a.defined;
        } else {
            entry.undefined = true;
        }
        matrix.entries.emplace(key, entry);
    }
    return matrix;
}

std::vector<std::string> select_judges(const ReliabilityMatrix& matrix, VisualDimension dimension,
                                       const JudgeRoster& roster, const SelectionRule& rule) {
    struct Scored {
        std::string judge_id;
        double kappa;
    };
    std::vector<Scored> scored;
    for (const auto& judge : roster.judges) {
        const ReliabilityEntry* entry = matrix.find(dimension, judge);
        if (entry == nullptr) {
            throw MissingEntryError(std::string(dimension_key(dimension)), judge);
        }
        if (entry->undefined) continue;
        scored.push_back({judge, entry->kappa});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.kappa != b.kappa) return a.kappa > b.kappa;
        return a.judge_id < b.judge_id;
    });

    std::vector<std::string> selected;
    if (rule.kind() == SelectionRule::Kind::threshold) {
        for (const auto& s : scored) {
            if (s.kappa >= rule.theta()) selected.push_back(s.judge_id);
        }
    } else {
        const auto take = std::min<std::size_t>(static_cast<std::size_t>(rule.k()), scored.size());
        for (std::size_t i = 0; i < take; ++i) selected.push_back(scored[i].judge_id);
    }
    return selected;
}

Rating naive_ensemble(const std::vector<Review>& initial_reviews) {
    if (initial_reviews.empty()) {
        throw EmptyInputError("naive ensemble of zero reviews");
    }
    double sum = 0.0;
    for (const auto& r : initial_reviews) sum += r.rating.value();
    return round_to_rating(sum / static_cast<double>(initial_reviews.size()));
}

namespace {

PromptBundle collective_prompt(const QARecord& record, const CandidateResponse& response,
                               const std::vector<Review>& initial_reviews,
                               const std::string& final_judge) {
    PromptBundle bundle;
    bundle.system =
        "You are the final judge of video question answering. You will see a video reference, "
        "a question, a candidate model's response, and initial reviews from a panel. Weigh the "
        "reviews critically against the content and issue your own consolidated verdict.";
    std::ostringstream user;
    user << "Visual dimension: " << dimension_display_name(record.dimension) << "\n"
         << "Video: " << record.video_ref << "\n"
         << "Question: " << record.question << "\n"
         << "Candidate response: " << response.text << "\n\n";
    if (initial_reviews.empty()) {
        user << "No initial reviews are available; assess the response entirely on your own.\n";
    } else {
        user << "Initial reviews:\n";
        int index = 1;
        for (const auto& review : initial_reviews) {
            user << "Reviewer " << index++ << " rated " << review.rating.value() << "/5";
            if (!review.rationale.empty()) {
                user << ": " << review.rationale;
            }
            user << "\n";
        }
        user << "\n";
    }
    user << "Reply with your reasoning first, then end with a single final line of the exact "
            "form:\nRating: <1-5>";
    bundle.turns.push_back({"user", user.str()});
    bundle.metadata = {record.record_id, response.candidate_id, final_judge};
    return bundle;
}

}  // namespace

CollectiveOutcome collective_review(const QARecord& record, const CandidateResponse& response,
                                    const std::vector<Review>& initial_reviews,
                                    const std::string& final_judge, ChatGateway& gateway) {
    CollectiveOutcome outcome;
    outcome.single_judge_fallback = initial_reviews.empty();
    outcome.review =
        query_review(gateway, collective_prompt(record, response, initial_reviews, final_judge),
                     ReviewMode::collective);
    return outcome;
}

CorpusSplit calibration_split(const std::vector<QARecord>& records, double fraction,
                              std::uint64_t seed) {
    if (fraction <= 0.0 || fraction >= 1.0) {
        throw OutOfRangeError(fraction, "calibration fraction must be in (0, 1)");
    }
    std::map<VisualDimension, std::vector<QARecord>> by_dim;
    for (const auto& r : records) by_dim[r.dimension].push_back(r);

    CorpusSplit split;
    for (auto& [dim, group] : by_dim) {
        std::sort(group.begin(), group.end(),
                  [](const QARecord& a, const QARecord& b) { return a.record_id < b.record_id; });
        auto rng = DeterministicRng::keyed(seed, std::string("split/") +
                                                     std::string(dimension_key(dim)));
        // Fisher-Yates with the keyed stream.
        for (std::size_t i = group.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.next_u64() % i);
            std::swap(group[i - 1], group[j]);
        }
        auto take = static_cast<std::size_t>(
            std::lround(fraction * static_cast<double>(group.size())));
        take = std::clamp<std::size_t>(take, 1, group.size());
        for (std::size_t i = 0; i < group.size(); ++i) {
            (i < take ? split.calibration : split.evaluation).push_back(group[i]);
        }
    }
    const auto by_id = [](const QARecord& a, const QARecord& b) {
        return a.record_id < b.record_id;
    };
    std::sort(split.calibration.begin(), split.calibration.end(), by_id);
    std::sort(split.evaluation.begin(), split.evaluation.end(), by_id);
    return split;
}

bool RunArtifacts::meets(double completion_fraction) const {
    if (total_units == 0) return true;
    return static_cast<double>(completed_units()) >=
           completion_fraction * static_cast<double>(total_units);
}

namespace {

struct Unit {
    const QARecord* record;
    const CandidateResponse* response;
};

struct UnitResult {
    std::vector<Review> individual;
    std::optional<Review> collective;
    std::vector<JudgeFailure> judge_failures;
    std::optional<UnitFailure> failure;
    bool fallback = false;
};

UnitResult evaluate_unit(const Unit& unit, const PipelineConfig& config,
                         const std::optional<ReliabilityMatrix>& matrix,
                         GatewayProvider& gateways) {
    const QARecord& record = *unit.record;
    const CandidateResponse& response = *unit.response;

    UnitResult result;
    std::vector<std::string> judges = config.roster.judges;
    if (config.rule.has_value()) {
        judges = select_judges(*matrix, record.dimension, config.roster, *config.rule);
    }

    for (const auto& judge : judges) {
        try {
            result.individual.push_back(
                judge_one(judge, record, response, gateways.gateway_for(judge)));
        } catch (const Error& e) {
            result.judge_failures.push_back(
                {record.record_id, response.candidate_id, judge, e.what()});
        }
    }

    try {
        auto outcome = collective_review(record, response, result.individual,
                                         config.roster.final_judge,
                                         gateways.gateway_for(config.roster.final_judge));
        result.fallback = outcome.single_judge_fallback;
        result.collective = std::move(outcome.review);
    } catch (const Error& e) {
        result.failure =
            UnitFailure{record.record_id, response.candidate_id, "collective", e.what()};
    }
    return result;
}

void canonical_review_sort(std::vector<Review>& reviews) {
    std::sort(reviews.begin(), reviews.end(), [](const Review& a, const Review& b) {
        return std::tie(a.record_id, a.candidate_id, a.judge_id, a.mode) <
               std::tie(b.record_id, b.candidate_id, b.judge_id, b.mode);
    });
}

}  // namespace

RunArtifacts run_pipeline(const std::vector<QARecord>& dataset,
                          const std::vector<CandidateResponse>& responses,
                          const PipelineConfig& config,
                          const std::optional<ReliabilityMatrix>& matrix,
                          GatewayProvider& gateways) {
    if (config.rule.has_value() && !matrix.has_value()) {
        throw Error("a selection rule requires a calibration reliability matrix");
    }

    std::map<std::string, const QARecord*> record_index;
    for (const auto& r : dataset) record_index.emplace(r.record_id, &r);

    std::vector<Unit> units;
    for (const auto& response : responses) {
        const auto it = record_index.find(response.record_id);
        if (it == record_index.end()) {
            throw Error("response references unknown record '" + response.record_id + "'");
        }
        units.push_back({it->second, &response});
    }

    std::vector<UnitResult> results(units.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(config.max_workers,
                                                  static_cast<int>(units.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < units.size(); i = next.fetch_add(1)) {
                results[i] = evaluate_unit(units[i], config, matrix, gateways);
            }
        });
    }
    for (auto& t : pool) t.join();

    RunArtifacts artifacts;
    artifacts.total_units = static_cast<std::int64_t>(units.size());
    for (auto& r : results) {
        artifacts.individual_reviews.insert(artifacts.individual_reviews.end(),
                                            std::make_move_iterator(r.individual.begin()),
                                            std::make_move_iterator(r.individual.end()));
        if (r.collective.has_value()) {
            artifacts.collective_reviews.push_back(std::move(*r.collective));
        }
        artifacts.judge_failures.insert(artifacts.judge_failures.end(),
                                        r.judge_failures.begin(), r.judge_failures.end());
        if (r.failure.has_value()) {
            artifacts.failures.push_back(std::move(*r.failure));
        }
        if (r.fallback) ++artifacts.single_judge_fallbacks;
    }

    canonical_review_sort(artifacts.individual_reviews);
    canonical_review_sort(artifacts.collective_reviews);
    const auto fail_order = [](const auto& a, const auto& b) {
        return std::tie(a.record_id, a.candidate_id) < std::tie(b.record_id, b.candidate_id);
    };
    std::sort(artifacts.failures.begin(), artifacts.failures.end(), fail_order);
    std::sort(artifacts.judge_failures.begin(), artifacts.judge_failures.end(),
              [](const JudgeFailure& a, const JudgeFailure& b) {
                  return std::tie(a.record_id, a.candidate_id, a.judge_id) <
                         std::tie(b.record_id, b.candidate_id, b.judge_id);
              });
    return artifacts;
}

}  // namespace judgekit
