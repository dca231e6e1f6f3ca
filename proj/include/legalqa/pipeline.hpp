#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "legalqa/corpus.hpp"
#include "legalqa/embeddings.hpp"
#include "legalqa/evaluation.hpp"
#include "legalqa/labeling.hpp"
#include "legalqa/scoring.hpp"
#include "legalqa/summarizer.hpp"

namespace legalqa::pipeline {

enum class System { word2vec_cosine, glove_cosine, transformer_cosine, transformer_euclidean, transformer_manhattan };

std::string_view to_string(System system);
System parse_system(std::string_view name);
scoring::Metric metric_of(System system);
bool is_transformer(System system);

struct Paths {
    std::optional<std::filesystem::path> train;
    std::optional<std::filesystem::path> dev;
    std::optional<std::filesystem::path> test;
    std::filesystem::path embeddings_dir = "embeddings";
    std::filesystem::path summaries_dir = "summaries";
    std::filesystem::path output_dir = "out";

    const std::optional<std::filesystem::path>& split_path(corpus::Split split) const;
};

// Declarative run configuration. JSON keys mirror the member names; see
// README for the schema. Values not given fall back to the system defaults.
struct RunConfig {
    Paths paths;
    System system = System::word2vec_cosine;
    labeling::LabelingRule rule;
    embeddings::TrainConfig train_config = embeddings::TrainConfig::word2vec_defaults();
    summarizer::SummarySpec summary_spec;
    std::string summarizer_command;  // empty: extractive fallback
    std::vector<corpus::Split> embedding_splits{corpus::Split::train, corpus::Split::dev, corpus::Split::test};
    std::uint64_t min_count = 1;
    std::uint64_t seed = 1;

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    // Internal consistency only; command-specific path checks happen in the commands.
    void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

// File layout shared by the commands (and the external embedding exporter).
std::filesystem::path summaries_split_dir(const RunConfig& config, corpus::Split split);
std::filesystem::path texts_file(const RunConfig& config, corpus::Split split);
std::filesystem::path word_vectors_file(const RunConfig& config);
std::filesystem::path vocab_file(const RunConfig& config);
std::filesystem::path transformer_vectors_file(const RunConfig& config, corpus::Split split);
// <system>[-norepl]-<split>
std::string run_stem(const RunConfig& config, corpus::Split split);

// Summarizes every question of each split into summaries/<split>/, replacing
// previous output atomically. Also writes texts.jsonl with the id -> text
// mapping consumed by the embedding exporter. Splits that are empty produce
// no files. Returns the number of summaries written.
std::size_t cmd_prepare(const RunConfig& config, std::span<const corpus::Split> splits, std::ostream& log);

// Trains word2vec or GloVe vectors (per config.system) over questions,
// answers and final summaries of config.embedding_splits.
void cmd_train_embeddings(const RunConfig& config, std::ostream& log);

struct ScoredSplit {
    corpus::Dataset dataset;
    std::vector<scoring::SimilarityRecord> scores;
};

// Loads the split, its cached summaries and vectors, and scores every group.
ScoredSplit score_split(const RunConfig& config, corpus::Split split);

evaluation::GoldLabels gold_labels(const corpus::Dataset& dataset);

struct PredictOutcome {
    std::filesystem::path predictions_file;
    std::filesystem::path scores_file;
    labeling::PredictionSet predictions;
    std::optional<evaluation::EvalReport> report;
    std::optional<evaluation::DistributionTable> distribution;
};

PredictOutcome cmd_predict(const RunConfig& config, corpus::Split split, std::ostream& log);

struct EvaluateOutcome {
    evaluation::EvalReport report;
    std::optional<evaluation::DistributionTable> distribution;
};

EvaluateOutcome cmd_evaluate(const RunConfig& config, corpus::Split split,
                             const std::filesystem::path& predictions_file,
                             const std::optional<std::filesystem::path>& scores_file, std::ostream& log);

// Sweeps rule.epsilon (similarity systems) or rule.delta (distance systems).
evaluation::ThresholdSweep cmd_sweep(const RunConfig& config, std::span<const corpus::Split> splits,
                                     std::span<const double> grid, std::ostream& log);

// "a,b,c" or "start:stop:step" (inclusive stop).
std::vector<double> parse_grid(std::string_view spec);

}  // namespace legalqa::pipeline
