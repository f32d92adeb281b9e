#include "judgekit/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace judgekit {

namespace {

struct DimensionInfo {
    VisualDimension dim;
    std::string_view key;
    std::string_view display;
};

constexpr std::array<DimensionInfo, kNumDimensions> kDimensionTable{{
    {VisualDimension::multi_actions, "multi_actions", "Multi Actions"},
    {VisualDimension::fine_action, "fine_action", "Fine Action"},
    {VisualDimension::partial_actions, "partial_actions", "Partial Actions"},
    {VisualDimension::time_order, "time_order", "Time Order"},
    {VisualDimension::nonexist_e, "nonexist_e", "Non-exist (E)"},
    {VisualDimension::nonexist_ne, "nonexist_ne", "Non-exist (NE)"},
    {VisualDimension::cont_obj, "cont_obj", "Cont. & Obj."},
    {VisualDimension::unusual_activities, "unusual_activities", "Unusual Activities"},
    {VisualDimension::social_context, "social_context", "Social Context"},
    {VisualDimension::emotional_context, "emotional_context", "Emotional Context"},
    {VisualDimension::visual_context, "visual_context", "Visual Context"},
}};

std::string normalize_key(std::string_view raw) {
    std::string s(raw);
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

const std::array<VisualDimension, kNumDimensions>& all_dimensions() {
    static const std::array<VisualDimension, kNumDimensions> dims = [] {
        std::array<VisualDimension, kNumDimensions> out{};
        for (int i = 0; i < kNumDimensions; ++i) out[i] = kDimensionTable[i].dim;
        return out;
    }();
    return dims;
}

std::string_view dimension_key(VisualDimension d) {
    return kDimensionTable[static_cast<std::size_t>(d)].key;
}

std::string_view dimension_display_name(VisualDimension d) {
    return kDimensionTable[static_cast<std::size_t>(d)].display;
}

VisualDimension parse_dimension(std::string_view key) {
    const std::string norm = normalize_key(key);
    for (const auto& info : kDimensionTable) {
        if (info.key == norm) return info.dim;
    }
    throw UnknownDimensionError(std::string(key));
}

std::string_view review_mode_name(ReviewMode m) {
    switch (m) {
        case ReviewMode::individual: return "individual";
        case ReviewMode::debate: return "debate";
        case ReviewMode::collective: return "collective";
    }
    return "individual";
}

ReviewMode parse_review_mode(std::string_view name) {
    if (name == "individual") return ReviewMode::individual;
    if (name == "debate") return ReviewMode::debate;
    if (name == "collective") return ReviewMode::collective;
    throw Error("unknown review mode: '" + std::string(name) + "'");
}

SelectionRule SelectionRule::threshold(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw OutOfRangeError(theta, "selection threshold must be in [0, 1]");
    }
    return SelectionRule(Kind::threshold, theta, 0);
}

SelectionRule SelectionRule::top_k(int k) {
    if (k < 1) {
        throw OutOfRangeError(k, "top_k selection requires k >= 1");
    }
    return SelectionRule(Kind::top_k, 0.0, k);
}

SelectionRule SelectionRule::parse(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw Error("selection rule must be 'threshold=<theta>' or 'top_k=<k>'");
    }
    const std::string_view name = text.substr(0, eq);
    const std::string value(text.substr(eq + 1));
    try {
        if (name == "threshold") return threshold(std::stod(value));
        if (name == "top_k") return top_k(std::stoi(value));
    } catch (const OutOfRangeError&) {
        throw;
    } catch (const std::exception&) {
        throw Error("selection rule value '" + value + "' is not a number");
    }
    throw Error("unknown selection rule '" + std::string(name) + "'");
}

std::string SelectionRule::to_string() const {
    if (kind_ == Kind::threshold) {
        return "threshold=" + std::to_string(theta_);
    }
    return "top_k=" + std::to_string(k_);
}

ComparisonOutcome compare_candidates(double score_a, double score_b) {
    if (!std::isfinite(score_a) || !std::isfinite(score_b)) {
        throw NonFiniteScoreError();
    }
    if (score_a > score_b) return ComparisonOutcome::a_wins;
    if (score_b > score_a) return ComparisonOutcome::b_wins;
    return ComparisonOutcome::tie;
}

}  // namespace judgekit
