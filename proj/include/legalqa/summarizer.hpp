#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalqa/error.hpp"

namespace legalqa::summarizer {

struct SummarySpec {
    std::size_t level1_segment_tokens = 1000;
    std::size_t level2_segment_tokens = 300;
    std::string joiner = " ";
    double per_segment_output_ratio = 0.3;  // extractive fallback only

    void validate() const;
};

enum class BackendKind { extractive_fallback, external, identity };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view name);

struct SummaryRecord {
    std::string question_id;
    std::string level1_summary;
    std::string final_summary;
    BackendKind backend = BackendKind::extractive_fallback;

    bool operator==(const SummaryRecord&) const = default;
};

class BackendError : public Error {
public:
    using Error::Error;
};

// Summarizes one chunk at a time; summarize_batch may be overridden by
// backends that amortize work across chunks. Outputs align with inputs.
class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendKind kind() const = 0;
    virtual std::string summarize(std::string_view text) = 0;
    virtual std::vector<std::string> summarize_batch(std::span<const std::string> texts);
};

class IdentityBackend final : public Backend {
public:
    BackendKind kind() const override { return BackendKind::identity; }
    std::string summarize(std::string_view text) override { return std::string(text); }
};

class ExtractiveBackend final : public Backend {
public:
    explicit ExtractiveBackend(double ratio = 0.3);
    BackendKind kind() const override { return BackendKind::extractive_fallback; }
    std::string summarize(std::string_view text) override;

private:
    double ratio_;
};

// Runs `command` through the shell once per batch. The command reads JSONL
// {"id", "text"} requests on stdin and writes JSONL {"id", "summary"} lines
// on stdout, in any order.
class ExternalBackend final : public Backend {
public:
    explicit ExternalBackend(std::string command);
    BackendKind kind() const override { return BackendKind::external; }
    std::string summarize(std::string_view text) override;
    std::vector<std::string> summarize_batch(std::span<const std::string> texts) override;

private:
    std::string command_;
};

// Greedy split of the token sequence into chunks of exactly max_tokens
// tokens (the last may be shorter). Chunks are substrings of the original
// text cut at token starts, so punctuation stays with the preceding chunk.
std::vector<std::string> segment(std::string_view text, std::size_t max_tokens);

// Two passes: chunk at level1_segment_tokens, summarize each chunk, join;
// then the same over the joined level-1 output at level2_segment_tokens.
SummaryRecord summarize_segmentwise(std::string_view text, const SummarySpec& spec, Backend& backend,
                                    std::string question_id = {});

// Sentences end at '.', '?' or '!' followed by whitespace.
std::vector<std::string> split_sentences(std::string_view text);

// Score of each sentence: mean over its tokens of freq(token) / max_freq,
// frequencies taken over the whole text. Sentences without tokens score 0.
std::vector<double> sentence_scores(std::span<const std::string> sentences);

// Keeps the ceil(ratio * n) best-scoring sentences in document order
// (score ties go to the earlier sentence), joined by single spaces.
std::string extractive_summarize(std::string_view text, double ratio);

// One JSON file per question: <dir>/<question_id>.json
void save_summary(const SummaryRecord& record, const std::filesystem::path& dir);
SummaryRecord load_summary(const std::filesystem::path& file);

}  // namespace legalqa::summarizer
