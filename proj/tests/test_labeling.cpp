#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "legalqa/error.hpp"
#include "legalqa/labeling.hpp"

using namespace legalqa;
using namespace legalqa::labeling;
using scoring::Metric;
using scoring::SimilarityRecord;

namespace {

std::vector<SimilarityRecord> group(const std::vector<double>& combined, Metric metric = Metric::cosine,
                                    const std::string& qid = "q") {
    std::vector<SimilarityRecord> out;
    for (std::size_t k = 0; k < combined.size(); ++k) {
        SimilarityRecord r;
        r.question_id = qid;
        r.candidate_id = qid + "_a" + std::to_string(k + 1);
        r.combined = combined[k];
        r.metric = metric;
        out.push_back(r);
    }
    return out;
}

LabelingRule similarity_rule(bool replace = true) {
    return {Mode::similarity, replace, 0.0005, 0.8};
}

LabelingRule distance_rule(bool replace = true) {
    return {Mode::distance, replace, 0.0005, 0.8};
}

std::size_t positive(const std::vector<int>& labels) {
    return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), 1) - labels.begin());
}

}  // namespace

TEST_CASE("similarity labeling examples") {
    CHECK(label_by_similarity(group({0.9, 0.2, 0.1}), similarity_rule()) == std::vector<int>{1, 0, 0});
    CHECK(label_by_similarity(group({0.9000, 0.8998, 0.1}), similarity_rule()) == std::vector<int>{0, 1, 0});
    CHECK(label_by_similarity(group({0.9000, 0.8998, 0.1}), similarity_rule(false)) == std::vector<int>{1, 0, 0});
    CHECK(label_by_similarity(group({0.4}), similarity_rule()) == std::vector<int>{1});
    CHECK(label_by_similarity(group({}), similarity_rule()).empty());
}

TEST_CASE("replacement boundaries") {
    // Both gaps are exactly representable.
    CHECK(label_by_similarity(group({0.0005, 0.0}), similarity_rule()) == std::vector<int>{0, 1});
    CHECK(label_by_similarity(group({0.0005 + 1e-12, 0.0}), similarity_rule()) == std::vector<int>{1, 0});
    CHECK(label_by_distance(group({0.0, 0.8}, Metric::euclidean), distance_rule()) == std::vector<int>{1, 0});
    CHECK(label_by_distance(group({0.0, 0.8 - 1e-12}, Metric::euclidean), distance_rule()) ==
          std::vector<int>{0, 1});
}

TEST_CASE("distance labeling examples") {
    CHECK(label_by_distance(group({3.0, 1.0, 5.0}), distance_rule()) == std::vector<int>{0, 1, 0});
    CHECK(label_by_distance(group({1.5, 1.0, 5.0}), distance_rule()) == std::vector<int>{1, 0, 0});
    CHECK(label_by_distance(group({1.5, 1.0, 5.0}), distance_rule(false)) == std::vector<int>{0, 1, 0});
    CHECK(label_by_distance(group({3.0, 1.0, 1.5}), distance_rule()) == std::vector<int>{0, 0, 1});
}

TEST_CASE("exact ties rank the smaller candidate id first") {
    auto g = group({0.7, 0.7, 0.1});
    CHECK(label_by_similarity(g, similarity_rule(false)) == std::vector<int>{1, 0, 0});
    // With replacement the tie is within epsilon, so the runner-up (a2) wins.
    CHECK(label_by_similarity(g, similarity_rule()) == std::vector<int>{0, 1, 0});
    std::swap(g[0], g[1]);
    CHECK(label_by_similarity(g, similarity_rule(false)) == std::vector<int>{0, 1, 0});
}

TEST_CASE("labels are invariant under permutation of the group") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> scores(2 + rng() % 4);
        for (auto& s : scores) s = static_cast<double>(rng() % 8) * 0.00025;
        const bool distance = rng() % 2;
        const auto rule = distance ? distance_rule() : similarity_rule();
        auto g = group(scores);
        const auto labels = label_group(g, rule);
        const auto winner = g[positive(labels)].candidate_id;
        std::shuffle(g.begin(), g.end(), rng);
        const auto shuffled = label_group(g, rule);
        CHECK(g[positive(shuffled)].candidate_id == winner);
        CHECK(std::count(shuffled.begin(), shuffled.end(), 1) == 1);
    }
}

TEST_CASE("epsilon zero reduces to argmax up to exact ties") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> scores(2 + rng() % 4);
        for (auto& s : scores) s = u(rng);
        LabelingRule rule{Mode::similarity, true, 0.0, 0.8};
        auto labels = label_by_similarity(group(scores), rule);
        CHECK(positive(labels) == static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin()));
    }
}

TEST_CASE("rule validation") {
    CHECK_THROWS_AS((LabelingRule{Mode::similarity, true, -0.1, 0.8}).validate(), ValidationError);
    CHECK_THROWS_AS((LabelingRule{Mode::distance, true, 0.0005, NAN}).validate(), ValidationError);
    CHECK(distance_rule().threshold() == 0.8);
    CHECK(similarity_rule().threshold() == 0.0005);
}

TEST_CASE("label_all labels consecutive groups and validates") {
    auto a = group({0.1, 0.9}, Metric::cosine, "q1");
    auto b = group({0.5, 0.2, 0.3}, Metric::cosine, "q2");
    std::vector<SimilarityRecord> all = a;
    all.insert(all.end(), b.begin(), b.end());
    auto preds = label_all(all, similarity_rule());
    REQUIRE(preds.rows.size() == 5);
    CHECK(preds.rows[1].label == 1);
    CHECK(preds.rows[2].label == 1);
    CHECK_NOTHROW(preds.validate());
    CHECK(preds.by_candidate().at("q2_a1") == 1);

    CHECK(parse_predictions_csv(format_predictions_csv(preds), "mem") == preds);

    preds.rows[3].label = 1;
    CHECK_THROWS_AS(preds.validate(), ValidationError);
}
