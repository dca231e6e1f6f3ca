#include "legalqa/evaluation.hpp"

#include <algorithm>
#include <cstdio>

#include "legalqa/error.hpp"

namespace legalqa::evaluation {

EvalReport evaluate_labels(std::span<const int> preds, std::span<const int> golds) {
    if (preds.size() != golds.size()) throw ValidationError("prediction and gold arrays differ in length");
    // confusion[gold][pred]
    std::array<std::array<std::size_t, 2>, 2> confusion{};
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if ((preds[i] != 0 && preds[i] != 1) || (golds[i] != 0 && golds[i] != 1)) {
            throw ValidationError("labels must be 0 or 1");
        }
        ++confusion[golds[i]][preds[i]];
    }

    EvalReport r;
    r.n = preds.size();
    if (r.n == 0) return r;
    r.accuracy = static_cast<double>(confusion[0][0] + confusion[1][1]) / static_cast<double>(r.n);
    for (int c = 0; c < 2; ++c) {
        const auto tp = static_cast<double>(confusion[c][c]);
        const auto predicted = static_cast<double>(confusion[0][c] + confusion[1][c]);
        const auto actual = static_cast<double>(confusion[c][0] + confusion[c][1]);
        auto& m = r.per_class[c];
        m.support = confusion[c][0] + confusion[c][1];
        m.precision = predicted > 0 ? tp / predicted : 0.0;
        m.recall = actual > 0 ? tp / actual : 0.0;
        m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    }
    r.macro_f1 = (r.per_class[0].f1 + r.per_class[1].f1) / 2.0;
    return r;
}

EvalReport evaluate(const labeling::PredictionSet& preds, const GoldLabels& golds) {
    std::vector<int> p, g;
    p.reserve(preds.rows.size());
    g.reserve(preds.rows.size());
    for (const auto& row : preds.rows) {
        auto it = golds.find(row.candidate_id);
        if (it == golds.end()) throw ValidationError("no gold label for candidate '" + row.candidate_id + "'");
        p.push_back(row.label);
        g.push_back(it->second);
    }
    return evaluate_labels(p, g);
}

std::size_t DistributionTable::total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

DistributionTable distribution_table(std::span<const scoring::SimilarityRecord> scores,
                                     const labeling::PredictionSet& preds, const GoldLabels& golds) {
    std::map<std::string, scoring::Source> source_of;
    for (const auto& s : scores) source_of[s.candidate_id] = s.higher_source;

    DistributionTable t;
    for (const auto& p : preds.rows) {
        auto s = source_of.find(p.candidate_id);
        if (s == source_of.end()) throw ValidationError("no scores for predicted candidate '" + p.candidate_id + "'");
        auto g = golds.find(p.candidate_id);
        if (g == golds.end()) throw ValidationError("no gold label for candidate '" + p.candidate_id + "'");
        const int row = s->second == scoring::Source::Q ? 0 : 1;
        const int col = p.label == g->second ? 0 : 1;
        ++t.counts[row][col];
    }
    return t;
}

ThresholdSweep best_of(std::vector<double> grid, std::vector<double> f1) {
    if (grid.empty()) throw ValidationError("threshold grid is empty");
    ThresholdSweep s;
    s.grid = std::move(grid);
    s.macro_f1 = std::move(f1);
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.grid.size(); ++k) {
        if (s.macro_f1[k] > s.macro_f1[best] || (s.macro_f1[k] == s.macro_f1[best] && s.grid[k] < s.grid[best])) {
            best = k;
        }
    }
    s.best_threshold = s.grid[best];
    s.best_f1 = s.macro_f1[best];
    return s;
}

ThresholdSweep sweep_threshold(std::span<const ScoredItem> items, std::span<const double> grid, Direction direction) {
    std::vector<int> golds;
    golds.reserve(items.size());
    for (const auto& it : items) golds.push_back(it.gold);

    std::vector<double> f1;
    std::vector<int> preds(items.size());
    for (double t : grid) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            const bool positive = direction == Direction::at_or_above ? items[i].score >= t : items[i].score < t;
            preds[i] = positive ? 1 : 0;
        }
        f1.push_back(evaluate_labels(preds, golds).macro_f1);
    }
    return best_of({grid.begin(), grid.end()}, std::move(f1));
}

ThresholdSweep sweep_rule_threshold(std::span<const scoring::SimilarityRecord> scores, const GoldLabels& golds,
                                    labeling::LabelingRule rule, std::span<const double> grid) {
    std::vector<double> f1;
    for (double t : grid) {
        if (rule.mode == labeling::Mode::similarity) {
            rule.epsilon = t;
        } else {
            rule.delta = t;
        }
        rule.validate();
        f1.push_back(evaluate(labeling::label_all(scores, rule), golds).macro_f1);
    }
    return best_of({grid.begin(), grid.end()}, std::move(f1));
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json per_class = nlohmann::json::object();
    for (int c = 0; c < 2; ++c) {
        const auto& m = report.per_class[c];
        per_class[std::to_string(c)] = {
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
    }
    return {{"accuracy", report.accuracy}, {"macro_f1", report.macro_f1}, {"n", report.n}, {"per_class", per_class}};
}

nlohmann::json to_json(const DistributionTable& table) {
    using scoring::Source;
    return {{"Q", {{"R", table.at(Source::Q, Outcome::R)}, {"W", table.at(Source::Q, Outcome::W)}}},
            {"S", {{"R", table.at(Source::S, Outcome::R)}, {"W", table.at(Source::S, Outcome::W)}}},
            {"total", table.total()}};
}

nlohmann::json to_json(const ThresholdSweep& sweep) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < sweep.grid.size(); ++k) {
        rows.push_back({{"threshold", sweep.grid[k]}, {"macro_f1", sweep.macro_f1[k]}});
    }
    return {{"rows", rows}, {"best_threshold", sweep.best_threshold}, {"best_f1", sweep.best_f1}};
}

std::string format_report(const std::string& name, const EvalReport& report) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-36s %8s %8s %6s\n", "Model", "Acc", "F1", "n");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-36s %8.4f %8.4f %6zu\n", name.c_str(), report.accuracy, report.macro_f1,
                  report.n);
    out += buf;
    out += "\n";
    std::snprintf(buf, sizeof buf, "%-8s %10s %10s %10s %8s\n", "Class", "Precision", "Recall", "F1", "Support");
    out += buf;
    for (int c = 0; c < 2; ++c) {
        const auto& m = report.per_class[c];
        std::snprintf(buf, sizeof buf, "%-8d %10.4f %10.4f %10.4f %8zu\n", c, m.precision, m.recall, m.f1, m.support);
        out += buf;
    }
    return out;
}

std::string format_distribution(const std::string& title, const DistributionTable& table) {
    using scoring::Source;
    char buf[128];
    std::string out = title + "\n";
    std::snprintf(buf, sizeof buf, "%-13s %-4s %6s\n", "Higher score", "R/W", "Count");
    out += buf;
    for (auto src : {Source::Q, Source::S}) {
        for (auto oc : {Outcome::R, Outcome::W}) {
            std::snprintf(buf, sizeof buf, "%-13s %-4s %6zu\n", std::string(scoring::to_string(src)).c_str(),
                          oc == Outcome::R ? "R" : "W", table.at(src, oc));
            out += buf;
        }
    }
    return out;
}

std::string format_sweep(const std::string& parameter, const ThresholdSweep& sweep) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-14s %10s\n", parameter.c_str(), "macro-F1");
    std::string out = buf;
    for (std::size_t k = 0; k < sweep.grid.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%-14.6g %10.4f%s\n", sweep.grid[k], sweep.macro_f1[k],
                      sweep.grid[k] == sweep.best_threshold ? "  *" : "");
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "best %s = %.6g (macro-F1 %.4f)\n", parameter.c_str(), sweep.best_threshold,
                  sweep.best_f1);
    out += buf;
    return out;
}

}  // namespace legalqa::evaluation
