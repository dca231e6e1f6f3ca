#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace legalqa::corpus {

enum class Split { train, dev, test };
enum class Format { jsonl, csv };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);
std::string_view to_string(Format format);
// Picks the format from the file extension (.jsonl/.json or .csv).
Format format_from_path(const std::filesystem::path& path);

struct AnswerCandidate {
    std::string candidate_id;
    std::string question_id;
    std::string answer_text;
    std::optional<int> gold_label;

    bool operator==(const AnswerCandidate&) const = default;
};

struct QaRecord {
    std::string question_id;
    std::string question_text;
    std::string explanation_text;
    std::vector<AnswerCandidate> candidates;
    std::optional<std::string> analysis_text;
    std::optional<std::string> complete_analysis_text;

    bool operator==(const QaRecord&) const = default;
};

struct Dataset {
    Split split_name = Split::train;
    std::vector<QaRecord> records;
    std::size_t candidate_count = 0;

    bool has_gold_labels() const;
    bool operator==(const Dataset&) const = default;
};

// One row of the input file, before grouping. `id` and `question_id` are
// optional columns; when absent they are derived from row order.
struct Row {
    std::optional<std::string> id;
    std::optional<std::string> question_id;
    std::string question;
    std::string answer;
    std::string explanation;
    std::optional<int> label;
    std::optional<std::string> analysis;
    std::optional<std::string> complete_analysis;
    std::size_t line = 0;
};

std::vector<Row> read_rows(const std::filesystem::path& path, Format format);

// Loads and validates one split. Rows with identical question text and
// explanation text share a question_id. Throws ParseError (with line number),
// ValidationError, or EmptyDatasetError.
Dataset load_split(const std::filesystem::path& path, Format format, Split split);
Dataset load_split(const std::filesystem::path& path, Split split);

// Builds a dataset from rows; exposed for in-memory construction in tests.
Dataset build_dataset(const std::vector<Row>& rows, Split split, const std::string& source = "<memory>");

// Regroups the candidates of `dataset` by (question_text, explanation_text).
// Groups appear in order of first occurrence, candidates in input order.
std::vector<QaRecord> group_by_question(const Dataset& dataset);

// Writes the dataset with explicit id/question_id columns, so that reloading
// reproduces it exactly.
void save_split(const Dataset& dataset, const std::filesystem::path& path, Format format);

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;  // line on which the record starts
};

// RFC-4180 record splitting; exposed for the predictions/scores readers.
std::vector<CsvRecord> parse_csv(std::string_view text, const std::string& source);
std::string csv_escape(std::string_view field);

}  // namespace legalqa::corpus
