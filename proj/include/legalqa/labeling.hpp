#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalqa/scoring.hpp"

namespace legalqa::labeling {

enum class Mode { similarity, distance };

std::string_view to_string(Mode mode);

struct LabelingRule {
    Mode mode = Mode::similarity;
    bool replacement_enabled = true;
    double epsilon = 0.0005;  // similarity: replace when top-two gap <= epsilon
    double delta = 0.8;       // distance: replace when top-two gap < delta

    void validate() const;
    // The threshold the current mode compares against.
    double threshold() const { return mode == Mode::similarity ? epsilon : delta; }
};

// Labels one group, aligned with `scores`. The highest combined similarity
// wins, unless replacement is enabled, the group has >= 2 candidates and
// |best - runner_up| <= epsilon, in which case the runner-up wins. Exact
// ties rank the smaller candidate_id first.
std::vector<int> label_by_similarity(std::span<const scoring::SimilarityRecord> scores, const LabelingRule& rule);

// Distance variant: the smallest combined distance wins unless replacement is
// enabled, the group has >= 2 candidates and (second_min - min) < delta.
std::vector<int> label_by_distance(std::span<const scoring::SimilarityRecord> scores, const LabelingRule& rule);

// Dispatches on rule.mode.
std::vector<int> label_group(std::span<const scoring::SimilarityRecord> scores, const LabelingRule& rule);

struct Prediction {
    std::string question_id;
    std::string candidate_id;
    int label = 0;

    bool operator==(const Prediction&) const = default;
};

// Rows keep dataset order. Exactly one positive per question.
struct PredictionSet {
    std::vector<Prediction> rows;

    // candidate_id -> label
    std::map<std::string, int> by_candidate() const;
    // Throws ValidationError unless every question has exactly one positive.
    void validate() const;

    bool operator==(const PredictionSet&) const = default;
};

// Labels consecutive runs of records sharing a question_id.
PredictionSet label_all(std::span<const scoring::SimilarityRecord> scores, const LabelingRule& rule);

// CSV columns: question_id, candidate_id, label.
std::string format_predictions_csv(const PredictionSet& preds);
PredictionSet parse_predictions_csv(std::string_view text, const std::string& source);

}  // namespace legalqa::labeling
