#include "judgekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace judgekit {

void ContingencyTable::add(Rating a, Rating b, std::int64_t count) {
    counts_[static_cast<std::size_t>(a.value() - 1)][static_cast<std::size_t>(b.value() - 1)] +=
        count;
    n_ += count;
}

ContingencyTable ContingencyTable::transposed() const {
    ContingencyTable t;
    t.counts_ = counts_;
    for (std::size_t i = 0; i < Rating::kCategories; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            std::swap(t.counts_[i][j], t.counts_[j][i]);
        }
    }
    t.n_ = n_;
    return t;
}

ContingencyTable build_contingency(const std::vector<RatingPair>& pairs) {
    if (pairs.empty()) {
        throw EmptyInputError("cannot build a contingency table from zero pairs");
    }
    ContingencyTable table;
    for (const auto& [a, b] : pairs) {
        table.add(a, b);
    }
    return table;
}

double disagreement_weight(Rating alpha, Rating beta) {
    const double diff =
        static_cast<double>(alpha.value() - beta.value()) / (Rating::kCategories - 1);
    return diff * diff;
}

ExpectedTable expected_table(const ContingencyTable& table) {
    std::array<double, Rating::kCategories> row{};
    std::array<double, Rating::kCategories> col{};
    for (int a = 1; a <= Rating::kCategories; ++a) {
        for (int b = 1; b <= Rating::kCategories; ++b) {
            const auto c = static_cast<double>(table.count(a, b));
            row[static_cast<std::size_t>(a - 1)] += c;
            col[static_cast<std::size_t>(b - 1)] += c;
        }
    }
    const auto n = static_cast<double>(table.total());
    ExpectedTable expected{};
    for (std::size_t i = 0; i < Rating::kCategories; ++i) {
        for (std::size_t j = 0; j < Rating::kCategories; ++j) {
            expected[i][j] = row[i] * col[j] / n;
        }
    }
    return expected;
}

double weighted_kappa(const ContingencyTable& table) {
    const ExpectedTable expected = expected_table(table);
    double observed_disagreement = 0.0;
    double expected_disagreement = 0.0;
    for (int a = 1; a <= Rating::kCategories; ++a) {
        for (int b = 1; b <= Rating::kCategories; ++b) {
            const double d = disagreement_weight(Rating(a), Rating(b));
            observed_disagreement += d * static_cast<double>(table.count(a, b));
            expected_disagreement +=
                d * expected[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)];
        }
    }
    if (expected_disagreement == 0.0) {
        throw DegenerateMarginalsError();
    }
    return 1.0 - observed_disagreement / expected_disagreement;
}

DimensionIndex make_dimension_index(const std::vector<QARecord>& records) {
    DimensionIndex index;
    index.reserve(records.size());
    for (const auto& r : records) {
        index.emplace(r.record_id, r.dimension);
    }
    return index;
}

AgreementReport agreement_by_group(const std::vector<Review>& test_reviews,
                                   const std::vector<Review>& reference_reviews,
                                   const DimensionIndex& dimensions) {
    // Reference side keyed by (record, candidate); first occurrence wins.
    std::map<std::pair<std::string, std::string>, Rating> reference;
    for (const auto& r : reference_reviews) {
        reference.emplace(std::make_pair(r.record_id, r.candidate_id), r.rating);
    }

    AgreementReport report;
    std::map<std::tuple<std::string, std::string, VisualDimension>, std::vector<RatingPair>>
        groups;
    std::set<std::pair<std::string, std::string>> matched;
    for (const auto& t : test_reviews) {
        const auto ref = reference.find({t.record_id, t.candidate_id});
        if (ref == reference.end()) {
            ++report.dropped_test;
            continue;
        }
        matched.insert(ref->first);
        const auto dim = dimensions.find(t.record_id);
        if (dim == dimensions.end()) {
            throw Error("record '" + t.record_id + "' has no known dimension");
        }
        groups[{t.judge_id, t.candidate_id, dim->second}].emplace_back(t.rating, ref->second);
    }
    report.dropped_reference =
        static_cast<std::int64_t>(reference.size()) - static_cast<std::int64_t>(matched.size());
    if (groups.empty()) {
        throw NoOverlapError();
    }

    for (const auto& [key, pairs] : groups) {
        AgreementScore score;
        score.judge_id = std::get<0>(key);
        score.candidate_id = std::get<1>(key);
        score.dimension = std::get<2>(key);
        score.n_items = static_cast<std::int64_t>(pairs.size());
        try {
            score.kappa = weighted_kappa(build_contingency(pairs));
        } catch (const DegenerateMarginalsError&) {
            score.kappa = 0.0;
            score.undefined = true;
        }
        report.scores.push_back(std::move(score));
    }
    return report;
}

std::string_view kappa_band_name(KappaBand band) {
    switch (band) {
        case KappaBand::none: return "none";
        case KappaBand::slight: return "slight";
        case KappaBand::fair: return "fair";
        case KappaBand::moderate: return "moderate";
        case KappaBand::substantial: return "substantial";
        case KappaBand::almost_perfect: return "almost_perfect";
    }
    return "none";
}

KappaBand interpret_kappa(double kappa) {
    constexpr double kEps = 1e-9;
    if (!std::isfinite(kappa) || kappa < -1.0 - kEps || kappa > 1.0 + kEps) {
        throw OutOfRangeError(kappa, "kappa outside [-1, 1]");
    }
    if (kappa <= 0.0) return KappaBand::none;
    if (kappa <= 0.20) return KappaBand::slight;
    if (kappa <= 0.40) return KappaBand::fair;
    if (kappa <= 0.60) return KappaBand::moderate;
    if (kappa <= 0.80) return KappaBand::substantial;
    return KappaBand::almost_perfect;
}

RatingHistogram rating_histogram(const std::vector<Review>& reviews) {
    RatingHistogram counts{};
    for (const auto& r : reviews) {
        ++counts[static_cast<std::size_t>(r.rating.value() - 1)];
    }
    return counts;
}

double mean_score(const std::vector<Review>& reviews) {
    if (reviews.empty()) {
        throw EmptyInputError("mean score of zero reviews");
    }
    double sum = 0.0;
    for (const auto& r : reviews) {
        sum += r.rating.value();
    }
    return sum / static_cast<double>(reviews.size());
}

}  // namespace judgekit
