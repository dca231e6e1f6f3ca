#include "legalqa/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "legalqa/error.hpp"

namespace legalqa::labeling {

std::string_view to_string(Mode mode) {
    return mode == Mode::similarity ? "similarity" : "distance";
}

void LabelingRule::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be >= 0");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be >= 0");
}

namespace {

// Candidate indices ordered best-first; ties by candidate_id.
std::vector<std::size_t> rank(std::span<const scoring::SimilarityRecord> scores, bool higher_is_better) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = scores[a].combined;
        const double sb = scores[b].combined;
        if (sa != sb) return higher_is_better ? sa > sb : sa < sb;
        return scores[a].candidate_id < scores[b].candidate_id;
    });
    return order;
}

std::vector<int> one_hot(std::size_t n, std::size_t winner) {
    std::vector<int> labels(n, 0);
    labels[winner] = 1;
    return labels;
}

}  // namespace

std::vector<int> label_by_similarity(std::span<const scoring::SimilarityRecord> scores, const LabelingRule& rule) {
    if (scores.empty()) return {};
    const auto order = rank(scores, true);
    std::size_t winner = order[0];
    if (rule.replacement_enabled && order.size() >= 2) {
        const double gap = std::abs(scores[order[0]].combined - scores[order[1]].combined);
        if (gap <= rule.epsilon) winner = order[1];
    }
    return one_hot(scores.size(), winner);
}

std::vector<int> label_by_distance(std::span<const scoring::SimilarityRecord> scores, const LabelingRule& rule) {
    if (scores.empty()) return {};
    const auto order = rank(scores, false);
    std::size_t winner = order[0];
    if (rule.replacement_enabled && order.size() >= 2) {
        const double gap = scores[order[1]].combined - scores[order[0]].combined;
        if (gap < rule.delta) winner = order[1];
    }
    return one_hot(scores.size(), winner);
}

std::vector<int> label_group(std::span<const scoring::SimilarityRecord> scores, const LabelingRule& rule) {
    return rule.mode == Mode::similarity ? label_by_similarity(scores, rule) : label_by_distance(scores, rule);
}

std::map<std::string, int> PredictionSet::by_candidate() const {
    std::map<std::string, int> out;
    for (const auto& p : rows) out[p.candidate_id] = p.label;
    return out;
}

void PredictionSet::validate() const {
    std::map<std::string, int> positives;
    for (const auto& p : rows) {
        if (p.label != 0 && p.label != 1) throw ValidationError("label for '" + p.candidate_id + "' is not 0/1");
        positives[p.question_id] += p.label;
    }
    for (const auto& [qid, n] : positives) {
        if (n != 1) {
            throw ValidationError("question '" + qid + "' has " + std::to_string(n) + " positive labels, expected 1");
        }
    }
}

PredictionSet label_all(std::span<const scoring::SimilarityRecord> scores, const LabelingRule& rule) {
    PredictionSet out;
    out.rows.reserve(scores.size());
    std::size_t begin = 0;
    while (begin < scores.size()) {
        std::size_t end = begin + 1;
        while (end < scores.size() && scores[end].question_id == scores[begin].question_id) ++end;
        const auto labels = label_group(scores.subspan(begin, end - begin), rule);
        for (std::size_t k = begin; k < end; ++k) {
            out.rows.push_back({scores[k].question_id, scores[k].candidate_id, labels[k - begin]});
        }
        begin = end;
    }
    return out;
}

std::string format_predictions_csv(const PredictionSet& preds) {
    std::string out = "question_id,candidate_id,label\n";
    for (const auto& p : preds.rows) {
        out += corpus::csv_escape(p.question_id) + ',' + corpus::csv_escape(p.candidate_id) + ',' +
               std::to_string(p.label) + '\n';
    }
    return out;
}

PredictionSet parse_predictions_csv(std::string_view text, const std::string& source) {
    auto rows = corpus::parse_csv(text, source);
    PredictionSet out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        if (f.size() != 3) throw ParseError(source, rows[r].line, "expected question_id,candidate_id,label");
        if (f[2] != "0" && f[2] != "1") throw ParseError(source, rows[r].line, "label must be 0 or 1");
        out.rows.push_back({f[0], f[1], f[2] == "1" ? 1 : 0});
    }
    return out;
}

}  // namespace legalqa::labeling
