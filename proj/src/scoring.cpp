#include "legalqa/scoring.hpp"

#include <charconv>
#include <cmath>

#include "legalqa/error.hpp"

namespace legalqa::scoring {

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::cosine: return "cosine";
        case Metric::euclidean: return "euclidean";
        case Metric::manhattan: return "manhattan";
    }
    return "?";
}

Metric parse_metric(std::string_view name) {
    if (name == "cosine") return Metric::cosine;
    if (name == "euclidean") return Metric::euclidean;
    if (name == "manhattan") return Metric::manhattan;
    throw ValidationError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Source source) {
    return source == Source::Q ? "Q" : "S";
}

double similarity(std::span<const double> u, std::span<const double> v, Metric metric) {
    if (u.size() != v.size()) {
        throw DimensionMismatch("vectors of dimension " + std::to_string(u.size()) + " and " +
                                std::to_string(v.size()) + " cannot be compared");
    }
    switch (metric) {
        case Metric::cosine: {
            double uv = 0.0, uu = 0.0, vv = 0.0;
            for (std::size_t k = 0; k < u.size(); ++k) {
                uv += u[k] * v[k];
                uu += u[k] * u[k];
                vv += v[k] * v[k];
            }
            if (uu == 0.0 || vv == 0.0) return 0.0;
            return uv / (std::sqrt(uu) * std::sqrt(vv));
        }
        case Metric::euclidean: {
            double s = 0.0;
            for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - v[k]) * (u[k] - v[k]);
            return std::sqrt(s);
        }
        case Metric::manhattan: {
            double s = 0.0;
            for (std::size_t k = 0; k < u.size(); ++k) s += std::abs(u[k] - v[k]);
            return s;
        }
    }
    return 0.0;
}

Source higher_source(double qa_score, double as_score, Metric metric) {
    const bool q_wins = is_distance(metric) ? qa_score < as_score : qa_score > as_score;
    return q_wins ? Source::Q : Source::S;
}

std::string summary_id(std::string_view question_id) {
    return std::string(question_id) + "_summary";
}

namespace {

const std::vector<double>& lookup(const VectorTable& vectors, const std::string& id, const char* what) {
    auto it = vectors.find(id);
    if (it == vectors.end()) throw ValidationError(std::string("no vector for ") + what + " '" + id + "'");
    return it->second;
}

}  // namespace

std::vector<SimilarityRecord> score_candidates(const corpus::QaRecord& group, const VectorTable& vectors,
                                               const summarizer::SummaryRecord& summary, Metric metric) {
    if (!summary.question_id.empty() && summary.question_id != group.question_id) {
        throw ValidationError("summary for '" + summary.question_id + "' paired with question '" +
                              group.question_id + "'");
    }
    const auto& q = lookup(vectors, group.question_id, "question");
    const auto& s = lookup(vectors, summary_id(group.question_id), "summary");

    std::vector<SimilarityRecord> out;
    out.reserve(group.candidates.size());
    for (const auto& cand : group.candidates) {
        const auto& a = lookup(vectors, cand.candidate_id, "answer");
        SimilarityRecord r;
        r.question_id = group.question_id;
        r.candidate_id = cand.candidate_id;
        r.metric = metric;
        r.qa_score = similarity(q, a, metric);
        r.as_score = similarity(a, s, metric);
        r.combined = (r.qa_score + r.as_score) / 2.0;
        r.higher_source = higher_source(r.qa_score, r.as_score, metric);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<double> calibrate_sigmoid_mean(std::span<const double> x) {
    if (x.empty()) throw ValidationError("calibration input is empty");
    double mean = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) throw ValidationError("calibration input must be finite");
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    std::vector<double> y;
    y.reserve(x.size());
    for (double v : x) y.push_back(1.0 / (1.0 + std::exp(-(v - mean))));
    return y;
}

// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& s, const std::string& source, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(source, line, "invalid number '" + s + "'");
    return v;
}

}  // namespace

std::string format_scores_csv(std::span<const SimilarityRecord> records) {
    std::string out = "question_id,candidate_id,metric,qa_score,as_score,combined,higher_source\n";
    for (const auto& r : records) {
        out += corpus::csv_escape(r.question_id) + ',' + corpus::csv_escape(r.candidate_id) + ',' +
               std::string(to_string(r.metric)) + ',' + format_double(r.qa_score) + ',' + format_double(r.as_score) +
               ',' + format_double(r.combined) + ',' + std::string(to_string(r.higher_source)) + '\n';
    }
    return out;
}

std::vector<SimilarityRecord> parse_scores_csv(std::string_view text, const std::string& source) {
    auto rows = corpus::parse_csv(text, source);
    std::vector<SimilarityRecord> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        const auto line = rows[r].line;
        if (f.size() != 7) throw ParseError(source, line, "expected 7 fields");
        SimilarityRecord rec;
        rec.question_id = f[0];
        rec.candidate_id = f[1];
        rec.metric = parse_metric(f[2]);
        rec.qa_score = parse_double(f[3], source, line);
        rec.as_score = parse_double(f[4], source, line);
        rec.combined = parse_double(f[5], source, line);
        if (f[6] != "Q" && f[6] != "S") throw ParseError(source, line, "higher_source must be Q or S");
        rec.higher_source = f[6] == "Q" ? Source::Q : Source::S;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace legalqa::scoring
