#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "judgekit/model.hpp"

namespace judgekit {

/// 5x5 paired-rating counts: row = rater-A rating, column = rater-B rating.
class ContingencyTable {
public:
    ContingencyTable() = default;

    void add(Rating a, Rating b, std::int64_t count = 1);

    /// Cell count for 1-based rating values.
    std::int64_t count(int alpha, int beta) const {
        return counts_[static_cast<std::size_t>(alpha - 1)][static_cast<std::size_t>(beta - 1)];
    }

    std::int64_t total() const { return n_; }

    ContingencyTable transposed() const;

    bool operator==(const ContingencyTable&) const = default;

private:
    std::array<std::array<std::int64_t, Rating::kCategories>, Rating::kCategories> counts_{};
    std::int64_t n_ = 0;
};

using RatingPair = std::pair<Rating, Rating>;

/// Throws EmptyInputError for an empty pair list.
ContingencyTable build_contingency(const std::vector<RatingPair>& pairs);

/// Quadratic disagreement weight ((alpha - beta) / (k - 1))^2.
///
/// Note on the weight convention: the agreement-weight form
/// w = 1 - ((alpha-beta)/(k-1))^2 combined with kappa = 1 - sum(wO)/sum(wE)
/// does not yield kappa = 1 under perfect agreement. We therefore use the
/// standard quadratic *disagreement* weight here, which does: it is zero on
/// the diagonal and 1 at maximal distance, and gives the usual band
/// semantics (see interpret_kappa).
double disagreement_weight(Rating alpha, Rating beta);

using ExpectedTable = std::array<std::array<double, Rating::kCategories>, Rating::kCategories>;

/// Expected cell frequencies under independent raters:
/// E[a][b] = row_marginal(a) * column_marginal(b) / n. Indices are 0-based
/// (rating value minus one). Sum of all cells equals n.
ExpectedTable expected_table(const ContingencyTable& table);

/// Quadratic-weighted Cohen's kappa:
///   kappa = 1 - sum(d * O) / sum(d * E)
/// with d the quadratic disagreement weight. Returns a fraction <= 1;
/// exactly 1 when all observed mass is on the diagonal. Throws
/// DegenerateMarginalsError when sum(d * E) == 0 (e.g. both raters
/// constant): agreement is undefined there, not perfect.
double weighted_kappa(const ContingencyTable& table);

/// Kappa for one (judge, candidate, dimension) group. `undefined` marks
/// groups with degenerate marginals; their kappa value is meaningless and
/// reports render them as NA.
struct AgreementScore {
    std::string judge_id;
    std::string candidate_id;
    VisualDimension dimension = VisualDimension::multi_actions;
    double kappa = 0.0;
    std::int64_t n_items = 0;
    bool undefined = false;

    bool operator==(const AgreementScore&) const = default;
};

struct AgreementReport {
    /// One score per (judge, candidate, dimension) group with >= 1 pair,
    /// sorted by (judge_id, candidate_id, dimension).
    std::vector<AgreementScore> scores;
    /// Reviews dropped by the inner join, surfaced rather than erroring:
    /// partial judge coverage is expected.
    std::int64_t dropped_test = 0;
    std::int64_t dropped_reference = 0;
};

using DimensionIndex = std::unordered_map<std::string, VisualDimension>;

DimensionIndex make_dimension_index(const std::vector<QARecord>& records);

/// Pairs test reviews with reference reviews by (record_id, candidate_id)
/// (inner join) and emits one AgreementScore per (test-judge, candidate,
/// dimension) group. Degenerate groups are emitted flagged `undefined`
/// rather than omitted. Every joined record_id must resolve through
/// `dimensions`. Throws NoOverlapError when the join is empty.
AgreementReport agreement_by_group(const std::vector<Review>& test_reviews,
                                   const std::vector<Review>& reference_reviews,
                                   const DimensionIndex& dimensions);

/// Interpretation bands for kappa values.
enum class KappaBand { none, slight, fair, moderate, substantial, almost_perfect };

std::string_view kappa_band_name(KappaBand band);

/// Maps kappa in [-1, 1] to its band: <= 0 none, (0, 0.20] slight,
/// (0.20, 0.40] fair, (0.40, 0.60] moderate, (0.60, 0.80] substantial,
/// (0.80, 1] almost perfect. Throws OutOfRangeError outside [-1, 1].
KappaBand interpret_kappa(double kappa);

using RatingHistogram = std::array<std::int64_t, Rating::kCategories>;

/// Counts ratings 1..5 (index 0 = rating 1). Empty input gives all zeros.
RatingHistogram rating_histogram(const std::vector<Review>& reviews);

/// Arithmetic mean of rating values. Throws EmptyInputError.
double mean_score(const std::vector<Review>& reviews);

}  // namespace judgekit
