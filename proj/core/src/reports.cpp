#include "judgekit/reports.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace judgekit {

namespace {

std::string fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::string dimension_header() {
    std::string out;
    for (const auto dim : all_dimensions()) {
        out += ',';
        out += csv_escape(std::string(dimension_key(dim)));
    }
    return out;
}

}  // namespace

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string emit_score_table(const std::vector<Review>& reviews,
                             const DimensionIndex& dimensions) {
    // (candidate, judge) -> dimension -> (sum, count)
    std::map<std::pair<std::string, std::string>,
             std::map<VisualDimension, std::pair<double, std::int64_t>>>
        cells;
    for (const auto& review : reviews) {
        const auto dim = dimensions.find(review.record_id);
        if (dim == dimensions.end()) {
            throw Error("review references unknown record '" + review.record_id + "'");
        }
        auto& cell = cells[{review.candidate_id, review.judge_id}][dim->second];
        cell.first += review.rating.value();
        ++cell.second;
    }

    std::ostringstream out;
    out << "candidate,judge" << dimension_header() << ",self_judging\n";
    for (const auto& [key, by_dim] : cells) {
        out << csv_escape(key.first) << ',' << csv_escape(key.second);
        for (const auto dim : all_dimensions()) {
            out << ',';
            if (const auto it = by_dim.find(dim); it != by_dim.end()) {
                out << fixed2(it->second.first / static_cast<double>(it->second.second));
            }
        }
        // A candidate may serve as its own judge; such rows are marked.
        out << ',' << (key.first == key.second ? "yes" : "") << "\n";
    }
    return out.str();
}

std::string emit_agreement_table(const std::vector<AgreementScore>& scores) {
    struct Cell {
        double kappa = 0.0;
        bool undefined = false;
        bool present = false;
    };
    // judge -> candidate -> dimension cell
    std::map<std::string, std::map<std::string, std::map<VisualDimension, Cell>>> table;
    for (const auto& s : scores) {
        table[s.judge_id][s.candidate_id][s.dimension] = Cell{s.kappa, s.undefined, true};
    }

    std::ostringstream out;
    out << "judge,candidate" << dimension_header() << ",self_judging\n";
    for (const auto& [judge, candidates] : table) {
        for (const auto& [candidate, by_dim] : candidates) {
            out << csv_escape(judge) << ',' << csv_escape(candidate);
            for (const auto dim : all_dimensions()) {
                out << ',';
                const auto it = by_dim.find(dim);
                if (it == by_dim.end()) continue;
                out << (it->second.undefined ? "NA" : fixed2(100.0 * it->second.kappa));
            }
            out << ',' << (judge == candidate ? "yes" : "") << "\n";
        }
        // Average over candidates, excluding undefined cells.
        out << csv_escape(judge) << ",Average";
        for (const auto dim : all_dimensions()) {
            out << ',';
            double sum = 0.0;
            int defined = 0;
            bool any = false;
            for (const auto& [candidate, by_dim] : candidates) {
                const auto it = by_dim.find(dim);
                if (it == by_dim.end()) continue;
                any = true;
                if (!it->second.undefined) {
                    sum += it->second.kappa;
                    ++defined;
                }
            }
            if (defined > 0) {
                out << fixed2(100.0 * sum / defined);
            } else if (any) {
                out << "NA";
            }
        }
        out << ",\n";
    }
    return out.str();
}

nlohmann::json emit_histograms(const std::vector<Review>& reviews) {
    std::map<std::string, std::vector<Review>> by_judge;
    for (const auto& r : reviews) by_judge[r.judge_id].push_back(r);

    nlohmann::json out = nlohmann::json::object();
    for (const auto& [judge, group] : by_judge) {
        const RatingHistogram counts = rating_histogram(group);
        nlohmann::json hist = nlohmann::json::object();
        for (int rating = 1; rating <= Rating::kCategories; ++rating) {
            hist[std::to_string(rating)] = counts[static_cast<std::size_t>(rating - 1)];
        }
        out[judge] = std::move(hist);
    }
    return out;
}

}  // namespace judgekit
