#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "legalqa/labeling.hpp"
#include "legalqa/scoring.hpp"

namespace legalqa::evaluation {

using GoldLabels = std::map<std::string, int>;  // candidate_id -> {0, 1}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;  // gold count of the class
};

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::array<ClassMetrics, 2> per_class{};  // index = class label
    std::size_t n = 0;
};

// Candidate-level metrics over parallel label arrays. Undefined precision or
// recall counts as 0, which makes that class's F1 0.
EvalReport evaluate_labels(std::span<const int> preds, std::span<const int> golds);

// Throws ValidationError naming the first predicted candidate without a gold label.
EvalReport evaluate(const labeling::PredictionSet& preds, const GoldLabels& golds);

enum class Outcome { R, W };

struct DistributionTable {
    // counts[source][outcome], source Q = 0 / S = 1, outcome R = 0 / W = 1
    std::array<std::array<std::size_t, 2>, 2> counts{};

    std::size_t at(scoring::Source source, Outcome outcome) const {
        return counts[source == scoring::Source::Q ? 0 : 1][outcome == Outcome::R ? 0 : 1];
    }
    std::size_t total() const;
    bool operator==(const DistributionTable&) const = default;
};

DistributionTable distribution_table(std::span<const scoring::SimilarityRecord> scores,
                                     const labeling::PredictionSet& preds, const GoldLabels& golds);

enum class Direction { at_or_above, below };  // score >= t -> 1, or score < t -> 1

struct ScoredItem {
    double score = 0.0;
    int gold = 0;
};

struct ThresholdSweep {
    std::vector<double> grid;
    std::vector<double> macro_f1;  // aligned with grid
    double best_threshold = 0.0;
    double best_f1 = 0.0;
};

// Picks the smallest grid value among those with the highest macro-F1.
ThresholdSweep best_of(std::vector<double> grid, std::vector<double> f1);

ThresholdSweep sweep_threshold(std::span<const ScoredItem> items, std::span<const double> grid, Direction direction);

// Relabels every group with the rule's threshold (epsilon or delta, by mode)
// set to each grid value.
ThresholdSweep sweep_rule_threshold(std::span<const scoring::SimilarityRecord> scores, const GoldLabels& golds,
                                    labeling::LabelingRule rule, std::span<const double> grid);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const DistributionTable& table);
nlohmann::json to_json(const ThresholdSweep& sweep);

// Aligned plain-text renderings.
std::string format_report(const std::string& name, const EvalReport& report);
std::string format_distribution(const std::string& title, const DistributionTable& table);
std::string format_sweep(const std::string& parameter, const ThresholdSweep& sweep);

}  // namespace legalqa::evaluation
