#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace legalqa::textproc {

using TokenList = std::vector<std::string>;
using Corpus = std::vector<TokenList>;

// Lowercased maximal runs of alphanumeric characters, in order. Input is
// UTF-8; Latin letters outside ASCII (e.g. "Â") count as alphabetic and are
// lowercased, other non-ASCII code points (e.g. "§") separate tokens.
TokenList tokenize(std::string_view text);

// Byte span of one token inside the original text.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Same segmentation as tokenize(), reporting positions instead of strings.
std::vector<TokenSpan> token_spans(std::string_view text);

class Vocabulary {
public:
    Vocabulary() = default;
    // Tokens must already be in index order and unique.
    Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> frequency);

    std::size_t size() const { return index_to_token_.size(); }
    bool empty() const { return index_to_token_.empty(); }

    std::optional<std::size_t> index(std::string_view token) const;
    const std::string& token(std::size_t index) const { return index_to_token_.at(index); }
    std::uint64_t frequency(std::size_t index) const { return frequency_.at(index); }

    const std::vector<std::string>& tokens() const { return index_to_token_; }
    const std::vector<std::uint64_t>& frequencies() const { return frequency_; }

    // "token<TAB>frequency" per line, index order.
    std::string serialize() const;
    static Vocabulary parse(std::string_view text, const std::string& source = "<vocab>");
    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);

    bool operator==(const Vocabulary& other) const {
        return index_to_token_ == other.index_to_token_ && frequency_ == other.frequency_;
    }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
    };

    std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> token_to_index_;
    std::vector<std::string> index_to_token_;
    std::vector<std::uint64_t> frequency_;
};

// Keeps tokens with frequency >= min_count, indexed by descending frequency
// then lexicographic token order. Throws EmptyVocabularyError when nothing
// survives the cutoff.
Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count = 1);

enum class Weighting { inverse_distance, uniform };

struct CooccurrenceEntry {
    std::uint32_t i = 0;  // i <= j
    std::uint32_t j = 0;
    double weight = 0.0;

    bool operator==(const CooccurrenceEntry&) const = default;
};

// Symmetric co-occurrence weights stored once per unordered pair (i <= j),
// sorted by (i, j). weight(i, j) == weight(j, i).
class CooccurrenceTable {
public:
    CooccurrenceTable() = default;
    CooccurrenceTable(std::size_t vocab_size, std::vector<CooccurrenceEntry> entries);

    std::size_t vocab_size() const { return vocab_size_; }
    const std::vector<CooccurrenceEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    // 0.0 when the pair never co-occurred.
    double weight(std::size_t i, std::size_t j) const;
    double total_mass() const;

    bool operator==(const CooccurrenceTable&) const = default;

private:
    std::size_t vocab_size_ = 0;
    std::vector<CooccurrenceEntry> entries_;
};

// Every pair of in-vocabulary tokens at distance d <= window within one
// document adds 1/d (inverse_distance) or 1 (uniform) to its unordered pair.
// Out-of-vocabulary tokens are dropped before windowing. Documents are
// counted in fixed-size blocks merged in block order, so the result does not
// depend on `threads`.
CooccurrenceTable count_cooccurrence(const Corpus& corpus, const Vocabulary& vocab, std::size_t window,
                                     Weighting weighting = Weighting::inverse_distance, unsigned threads = 1);

}  // namespace legalqa::textproc
