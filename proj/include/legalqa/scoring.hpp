#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalqa/corpus.hpp"
#include "legalqa/summarizer.hpp"

namespace legalqa::scoring {

enum class Metric { cosine, euclidean, manhattan };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

// Similarities grow with agreement, distances shrink.
constexpr bool is_distance(Metric metric) {
    return metric != Metric::cosine;
}

enum class Source { Q, S };

std::string_view to_string(Source source);

struct SimilarityRecord {
    std::string question_id;
    std::string candidate_id;
    double qa_score = 0.0;
    double as_score = 0.0;
    double combined = 0.0;
    Metric metric = Metric::cosine;
    Source higher_source = Source::S;

    bool operator==(const SimilarityRecord&) const = default;
};

// cosine = u.v / (|u||v|) (0.0 when either norm is zero),
// euclidean = |u - v|_2, manhattan = |u - v|_1. Throws DimensionMismatch.
double similarity(std::span<const double> u, std::span<const double> v, Metric metric);

// Q when the question-answer score outranks the answer-summary score under
// the metric's orientation; S otherwise (ties included).
Source higher_source(double qa_score, double as_score, Metric metric);

// Vector ids: question_id for the question, candidate_id for each answer,
// summary_id(question_id) for the summary.
using VectorTable = std::map<std::string, std::vector<double>, std::less<>>;

std::string summary_id(std::string_view question_id);

std::vector<SimilarityRecord> score_candidates(const corpus::QaRecord& group, const VectorTable& vectors,
                                               const summarizer::SummaryRecord& summary, Metric metric);

// y_i = 1 / (1 + exp(-(x_i - mean(x)))). Throws ValidationError on empty or
// non-finite input.
std::vector<double> calibrate_sigmoid_mean(std::span<const double> x);

// CSV columns: question_id, candidate_id, metric, qa_score, as_score,
// combined, higher_source.
std::string format_scores_csv(std::span<const SimilarityRecord> records);
std::vector<SimilarityRecord> parse_scores_csv(std::string_view text, const std::string& source);

}  // namespace legalqa::scoring
