#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "judgekit/stats.hpp"

namespace judgekit {

/// RFC-4180 cell escaping: quotes a field when it contains a comma, quote,
/// or newline.
std::string csv_escape(const std::string& field);

/// Mean-score table: one row per (candidate, judge), one column per visual
/// dimension in canonical order, cells to two decimals, empty where that
/// pair has no reviews in the dimension. A trailing self_judging column
/// marks rows where a model judged itself.
std::string emit_score_table(const std::vector<Review>& reviews, const DimensionIndex& dimensions);

/// Agreement table grouped by judge: one row per candidate plus an Average
/// row (mean over candidates, skipping undefined cells). Stored kappas are
/// fractions; cells here are scaled x100 with two decimals to mirror the
/// percent-style convention. Undefined cells render as "NA"; self-judging
/// rows are marked like in the score table.
std::string emit_agreement_table(const std::vector<AgreementScore>& scores);

/// Per-judge rating counts, keys "1".."5".
nlohmann::json emit_histograms(const std::vector<Review>& reviews);

}  // namespace judgekit
