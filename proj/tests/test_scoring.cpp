#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "legalqa/error.hpp"
#include "legalqa/scoring.hpp"

using namespace legalqa;
using namespace legalqa::scoring;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> n(0.0, 2.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = n(rng);
    return v;
}

double oracle(const std::vector<double>& u, const std::vector<double>& v, Metric m) {
    double dot = 0, nu = 0, nv = 0, l2 = 0, l1 = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        dot += u[k] * v[k];
        nu += u[k] * u[k];
        nv += v[k] * v[k];
        l2 += (u[k] - v[k]) * (u[k] - v[k]);
        l1 += std::abs(u[k] - v[k]);
    }
    switch (m) {
        case Metric::cosine: return nu == 0 || nv == 0 ? 0.0 : dot / std::sqrt(nu * nv);
        case Metric::euclidean: return std::sqrt(l2);
        case Metric::manhattan: return l1;
    }
    return NAN;
}

std::vector<std::size_t> argsort(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    return idx;
}

}  // namespace

TEST_CASE("metrics match a scalar loop") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t dim = 1 + rng() % 40;
        auto u = random_vec(rng, dim);
        auto v = random_vec(rng, dim);
        for (auto m : {Metric::cosine, Metric::euclidean, Metric::manhattan}) {
            CHECK(similarity(u, v, m) == doctest::Approx(oracle(u, v, m)).epsilon(1e-12));
        }
    }
}

TEST_CASE("metric properties") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 1 + rng() % 20;
        auto u = random_vec(rng, dim);
        auto v = random_vec(rng, dim);
        auto w = random_vec(rng, dim);
        const double c = similarity(u, v, Metric::cosine);
        CHECK(c <= 1.0 + 1e-12);
        CHECK(c >= -1.0 - 1e-12);
        CHECK(similarity(u, u, Metric::cosine) == doctest::Approx(1.0));

        auto scaled = u;
        for (auto& x : scaled) x *= 3.7;
        CHECK(similarity(scaled, v, Metric::cosine) == doctest::Approx(c).epsilon(1e-12));

        for (auto m : {Metric::euclidean, Metric::manhattan}) {
            CHECK(similarity(u, u, m) == 0.0);
            CHECK(similarity(u, v, m) == similarity(v, u, m));
            CHECK(similarity(u, w, m) <= similarity(u, v, m) + similarity(v, w, m) + 1e-12);
        }
    }
    std::vector<double> zero(3, 0.0), one{1, 2, 3};
    CHECK(similarity(zero, one, Metric::cosine) == 0.0);
    CHECK_THROWS_AS(similarity(zero, std::vector<double>(2), Metric::cosine), DimensionMismatch);
}

TEST_CASE("higher source follows the metric orientation") {
    CHECK(higher_source(0.9, 0.1, Metric::cosine) == Source::Q);
    CHECK(higher_source(0.1, 0.9, Metric::cosine) == Source::S);
    CHECK(higher_source(0.5, 0.5, Metric::cosine) == Source::S);
    CHECK(higher_source(0.1, 0.9, Metric::euclidean) == Source::Q);
    CHECK(higher_source(0.9, 0.1, Metric::manhattan) == Source::S);
}

TEST_CASE("score_candidates combines question and summary scores") {
    corpus::QaRecord group;
    group.question_id = "q0001";
    group.candidates = {{"q0001_a1", "q0001", "x", 1}, {"q0001_a2", "q0001", "y", 0}};
    summarizer::SummaryRecord summary{"q0001", "", "s", summarizer::BackendKind::identity};
    VectorTable vectors{{"q0001", {1, 0}}, {"q0001_a1", {1, 1}}, {"q0001_a2", {0, 1}}, {"q0001_summary", {0, 1}}};

    auto recs = score_candidates(group, vectors, summary, Metric::cosine);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].qa_score == doctest::Approx(std::sqrt(0.5)));
    CHECK(recs[0].as_score == doctest::Approx(std::sqrt(0.5)));
    CHECK(recs[0].combined == doctest::Approx(std::sqrt(0.5)));
    CHECK(recs[1].qa_score == doctest::Approx(0.0));
    CHECK(recs[1].as_score == doctest::Approx(1.0));
    CHECK(recs[1].combined == doctest::Approx(0.5));
    CHECK(recs[1].higher_source == Source::S);
    CHECK(recs[1].candidate_id == "q0001_a2");

    vectors.erase("q0001_summary");
    try {
        score_candidates(group, vectors, summary, Metric::cosine);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("q0001_summary") != std::string::npos);
    }
}

TEST_CASE("sigmoid-mean calibration") {
    std::vector<double> x{0, 1, 2};
    auto y = calibrate_sigmoid_mean(x);
    CHECK(y[0] == doctest::Approx(0.26894).epsilon(1e-4));
    CHECK(y[1] == doctest::Approx(0.5));
    CHECK(y[2] == doctest::Approx(0.73106).epsilon(1e-4));

    std::vector<double> constant(7, 3.25);
    for (double v : calibrate_sigmoid_mean(constant)) CHECK(v == 0.5);

    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        auto v = random_vec(rng, 1 + rng() % 30);
        CHECK(argsort(calibrate_sigmoid_mean(v)) == argsort(v));
    }
    CHECK_THROWS_AS(calibrate_sigmoid_mean(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(calibrate_sigmoid_mean(std::vector<double>{1.0, NAN}), ValidationError);
}

TEST_CASE("scores CSV round-trips exactly") {
    std::mt19937_64 rng(73);
    std::vector<SimilarityRecord> recs;
    for (int k = 0; k < 30; ++k) {
        auto v = random_vec(rng, 2);
        SimilarityRecord r{"q" + std::to_string(k / 3), "q" + std::to_string(k / 3) + "_a" + std::to_string(k % 3),
                           v[0], v[1], (v[0] + v[1]) / 2, Metric::manhattan, higher_source(v[0], v[1], Metric::manhattan)};
        recs.push_back(r);
    }
    CHECK(parse_scores_csv(format_scores_csv(recs), "mem") == recs);
    CHECK_THROWS_AS(parse_scores_csv("question_id,candidate_id\nq,a\n", "mem"), ParseError);
}
