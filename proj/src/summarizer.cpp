#include "legalqa/summarizer.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "legalqa/io.hpp"
#include "legalqa/textproc.hpp"

namespace legalqa::summarizer {

using nlohmann::json;

void SummarySpec::validate() const {
    if (level1_segment_tokens < 1 || level2_segment_tokens < 1) {
        throw ValidationError("summary segment sizes must be >= 1");
    }
    if (level2_segment_tokens > level1_segment_tokens) {
        throw ValidationError("level-2 segment size must not exceed the level-1 size");
    }
    if (!(per_segment_output_ratio > 0.0 && per_segment_output_ratio <= 1.0)) {
        throw ValidationError("summary output ratio must lie in (0, 1]");
    }
}

std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::extractive_fallback: return "extractive_fallback";
        case BackendKind::external: return "external";
        case BackendKind::identity: return "identity";
    }
    return "?";
}

BackendKind parse_backend_kind(std::string_view name) {
    if (name == "extractive_fallback") return BackendKind::extractive_fallback;
    if (name == "external") return BackendKind::external;
    if (name == "identity") return BackendKind::identity;
    throw ValidationError("unknown summarizer backend '" + std::string(name) + "'");
}

std::vector<std::string> Backend::summarize_batch(std::span<const std::string> texts) {
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        try {
            out.push_back(summarize(texts[i]));
        } catch (const std::exception& e) {
            throw BackendError("chunk " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string join(const std::vector<std::string>& parts, const std::string& joiner) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += joiner;
        out += parts[i];
    }
    return out;
}

}  // namespace

std::vector<std::string> segment(std::string_view text, std::size_t max_tokens) {
    if (max_tokens < 1) throw ValidationError("segment size must be >= 1");
    const auto spans = textproc::token_spans(text);
    std::vector<std::string> chunks;
    for (std::size_t first = 0; first < spans.size(); first += max_tokens) {
        const std::size_t begin = first == 0 ? 0 : spans[first].begin;
        const std::size_t next = first + max_tokens;
        const std::size_t end = next < spans.size() ? spans[next].begin : text.size();
        chunks.emplace_back(trim(text.substr(begin, end - begin)));
    }
    return chunks;
}

namespace {

std::string summarize_level(std::string_view text, std::size_t max_tokens, const std::string& joiner,
                            Backend& backend, int level) {
    const auto chunks = segment(text, max_tokens);
    if (chunks.empty()) return {};
    std::vector<std::string> outputs;
    try {
        outputs = backend.summarize_batch(chunks);
    } catch (const BackendError& e) {
        throw BackendError("level " + std::to_string(level) + " " + e.what());
    } catch (const std::exception& e) {
        throw BackendError("level " + std::to_string(level) + ": " + e.what());
    }
    if (outputs.size() != chunks.size()) {
        throw BackendError("level " + std::to_string(level) + ": backend returned " +
                           std::to_string(outputs.size()) + " summaries for " + std::to_string(chunks.size()) +
                           " chunks");
    }
    return join(outputs, joiner);
}

}  // namespace

SummaryRecord summarize_segmentwise(std::string_view text, const SummarySpec& spec, Backend& backend,
                                    std::string question_id) {
    spec.validate();
    SummaryRecord rec;
    rec.question_id = std::move(question_id);
    rec.backend = backend.kind();
    rec.level1_summary = summarize_level(text, spec.level1_segment_tokens, spec.joiner, backend, 1);
    rec.final_summary = summarize_level(rec.level1_summary, spec.level2_segment_tokens, spec.joiner, backend, 2);
    return rec;
}

// ---------------------------------------------------------------------------

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {
        auto s = trim(text.substr(start, end - start));
        if (!s.empty()) out.emplace_back(s);
        start = end;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if ((c == '.' || c == '?' || c == '!') && i + 1 < text.size() && is_space(text[i + 1])) {
            flush(i + 1);
        }
    }
    flush(text.size());
    return out;
}

std::vector<double> sentence_scores(std::span<const std::string> sentences) {
    std::vector<textproc::TokenList> tokens;
    tokens.reserve(sentences.size());
    std::unordered_map<std::string, double> freq;
    double max_freq = 0.0;
    for (const auto& s : sentences) {
        tokens.push_back(textproc::tokenize(s));
        for (const auto& t : tokens.back()) max_freq = std::max(max_freq, ++freq[t]);
    }
    std::vector<double> scores;
    scores.reserve(sentences.size());
    for (const auto& toks : tokens) {
        if (toks.empty()) {
            scores.push_back(0.0);
            continue;
        }
        double sum = 0.0;
        for (const auto& t : toks) sum += freq[t] / max_freq;
        scores.push_back(sum / static_cast<double>(toks.size()));
    }
    return scores;
}

std::string extractive_summarize(std::string_view text, double ratio) {
    if (!(ratio > 0.0 && ratio <= 1.0)) throw ValidationError("extractive ratio must lie in (0, 1]");
    const auto sentences = split_sentences(text);
    if (sentences.size() <= 1) return std::string(text);

    const std::size_t n = sentences.size();
    // The epsilon keeps products such as 0.3 * 10 from rounding up past an integer.
    auto keep = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
    keep = std::clamp<std::size_t>(keep, 1, n);

    const auto scores = sentence_scores(sentences);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(keep);
    std::sort(order.begin(), order.end());

    std::string out;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k) out += ' ';
        out += sentences[order[k]];
    }
    return out;
}

ExtractiveBackend::ExtractiveBackend(double ratio) : ratio_(ratio) {
    if (!(ratio > 0.0 && ratio <= 1.0)) throw ValidationError("extractive ratio must lie in (0, 1]");
}

std::string ExtractiveBackend::summarize(std::string_view text) {
    return extractive_summarize(text, ratio_);
}

// ---------------------------------------------------------------------------

ExternalBackend::ExternalBackend(std::string command) : command_(std::move(command)) {
    if (command_.empty()) throw ValidationError("external summarizer command is empty");
}

std::string ExternalBackend::summarize(std::string_view text) {
    std::vector<std::string> one{std::string(text)};
    return summarize_batch(one).front();
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("legalqa-summ-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace

std::vector<std::string> ExternalBackend::summarize_batch(std::span<const std::string> texts) {
    if (texts.empty()) return {};
    TempDir tmp;
    const auto in_path = tmp.path() / "requests.jsonl";
    const auto out_path = tmp.path() / "responses.jsonl";
    {
        std::ofstream in(in_path, std::ios::binary);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            in << json{{"id", std::to_string(i)}, {"text", texts[i]}}.dump(-1, ' ', false,
                                                                          json::error_handler_t::replace)
               << '\n';
        }
    }
    const std::string cmd = "(" + command_ + ") < " + shell_quote(in_path.string()) + " > " +
                            shell_quote(out_path.string());
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        throw BackendError("external summarizer '" + command_ + "' failed with status " + std::to_string(status));
    }

    std::map<std::size_t, std::string> by_id;
    std::ifstream out(out_path, std::ios::binary);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(out, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            auto obj = json::parse(line);
            const auto id = std::stoull(obj.at("id").get<std::string>());
            by_id[id] = obj.at("summary").get<std::string>();
        } catch (const std::exception& e) {
            throw BackendError("external summarizer output line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    std::vector<std::string> result;
    result.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto it = by_id.find(i);
        if (it == by_id.end()) throw BackendError("chunk " + std::to_string(i) + ": no summary returned");
        result.push_back(std::move(it->second));
    }
    return result;
}

// ---------------------------------------------------------------------------

void save_summary(const SummaryRecord& record, const std::filesystem::path& dir) {
    json obj = {{"question_id", record.question_id},
                {"level1_summary", record.level1_summary},
                {"final_summary", record.final_summary},
                {"backend", std::string(to_string(record.backend))}};
    io::write_file_atomic(dir / (record.question_id + ".json"),
                          obj.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
}

SummaryRecord load_summary(const std::filesystem::path& file) {
    try {
        auto obj = json::parse(io::read_file(file));
        SummaryRecord rec;
        rec.question_id = obj.at("question_id").get<std::string>();
        rec.level1_summary = obj.at("level1_summary").get<std::string>();
        rec.final_summary = obj.at("final_summary").get<std::string>();
        rec.backend = parse_backend_kind(obj.at("backend").get<std::string>());
        return rec;
    } catch (const json::exception& e) {
        throw ParseError(file.string(), 0, e.what());
    }
}

}  // namespace legalqa::summarizer
