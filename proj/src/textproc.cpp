#include "legalqa/textproc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "legalqa/error.hpp"
#include "legalqa/io.hpp"

namespace legalqa::textproc {

namespace {

struct CodePoint {
    char32_t value = 0;
    std::size_t length = 1;  // bytes consumed
    bool valid = false;
};

CodePoint decode_utf8(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1, true};

    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0, 1, false};
    }
    if (pos + len > s.size()) return {0, 1, false};
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[pos + k]);
        if ((b & 0xC0) != 0x80) return {0, 1, false};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len, true};
}

bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;  // Latin-1 letters, Latin Extended-A/B
    if (cp >= 0x370 && cp <= 0x52F) return true;                      // Greek, Cyrillic
    return false;
}

char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace

std::vector<TokenSpan> token_spans(std::string_view text) {
    std::vector<TokenSpan> spans;
    std::size_t pos = 0;
    bool in_token = false;
    TokenSpan current;
    while (pos < text.size()) {
        auto cp = decode_utf8(text, pos);
        bool word = cp.valid && is_word_char(cp.value);
        if (word && !in_token) {
            current.begin = pos;
            in_token = true;
        } else if (!word && in_token) {
            current.end = pos;
            spans.push_back(current);
            in_token = false;
        }
        pos += cp.length;
    }
    if (in_token) {
        current.end = text.size();
        spans.push_back(current);
    }
    return spans;
}

TokenList tokenize(std::string_view text) {
    TokenList tokens;
    for (const auto& span : token_spans(text)) {
        std::string tok;
        tok.reserve(span.end - span.begin);
        for (std::size_t pos = span.begin; pos < span.end;) {
            auto cp = decode_utf8(text, pos);
            append_utf8(tok, to_lower(cp.value));
            pos += cp.length;
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> frequency)
    : index_to_token_(std::move(tokens)), frequency_(std::move(frequency)) {
    if (index_to_token_.size() != frequency_.size()) {
        throw ValidationError("vocabulary token and frequency arrays differ in length");
    }
    token_to_index_.reserve(index_to_token_.size());
    for (std::size_t i = 0; i < index_to_token_.size(); ++i) {
        if (!token_to_index_.emplace(index_to_token_[i], i).second) {
            throw ValidationError("duplicate vocabulary token '" + index_to_token_[i] + "'");
        }
    }
}

std::optional<std::size_t> Vocabulary::index(std::string_view token) const {
    auto it = token_to_index_.find(token);
    if (it == token_to_index_.end()) return std::nullopt;
    return it->second;
}

std::string Vocabulary::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < size(); ++i) {
        out += index_to_token_[i];
        out += '\t';
        out += std::to_string(frequency_[i]);
        out += '\n';
    }
    return out;
}

Vocabulary Vocabulary::parse(std::string_view text, const std::string& source) {
    std::vector<std::string> tokens;
    std::vector<std::uint64_t> freq;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(source, line_no, "expected token<TAB>frequency");
        try {
            std::size_t used = 0;
            auto count = std::stoull(line.substr(tab + 1), &used);
            if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
            freq.push_back(count);
        } catch (const std::exception&) {
            throw ParseError(source, line_no, "invalid frequency");
        }
        tokens.push_back(line.substr(0, tab));
    }
    return Vocabulary(std::move(tokens), std::move(freq));
}

void Vocabulary::save(const std::filesystem::path& path) const {
    io::write_file_atomic(path, serialize());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    return parse(io::read_file(path), path.string());
}

Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count) {
    if (min_count < 1) throw ValidationError("min_count must be >= 1");
    std::map<std::string, std::uint64_t> counts;
    for (const auto& doc : corpus) {
        for (const auto& tok : doc) ++counts[tok];
    }
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [tok, n] : counts) {
        if (n >= min_count) kept.emplace_back(tok, n);
    }
    if (kept.empty()) {
        throw EmptyVocabularyError("no token reaches min_count " + std::to_string(min_count));
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    std::vector<std::string> tokens;
    std::vector<std::uint64_t> freq;
    tokens.reserve(kept.size());
    freq.reserve(kept.size());
    for (auto& [tok, n] : kept) {
        tokens.push_back(std::move(tok));
        freq.push_back(n);
    }
    return Vocabulary(std::move(tokens), std::move(freq));
}

// ---------------------------------------------------------------------------

CooccurrenceTable::CooccurrenceTable(std::size_t vocab_size, std::vector<CooccurrenceEntry> entries)
    : vocab_size_(vocab_size), entries_(std::move(entries)) {
    for (auto& e : entries_) {
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.j >= vocab_size_) throw ValidationError("co-occurrence index out of vocabulary range");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw ValidationError("co-occurrence weights must be finite and positive");
        }
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
}

double CooccurrenceTable::weight(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(i, j),
                               [](const CooccurrenceEntry& e, const std::pair<std::size_t, std::size_t>& key) {
                                   return std::pair<std::size_t, std::size_t>(e.i, e.j) < key;
                               });
    if (it == entries_.end() || it->i != i || it->j != j) return 0.0;
    return it->weight;
}

double CooccurrenceTable::total_mass() const {
    double total = 0.0;
    for (const auto& e : entries_) total += e.weight;
    return total;
}

namespace {

constexpr std::size_t kDocsPerBlock = 64;

using PairMap = std::map<std::pair<std::uint32_t, std::uint32_t>, double>;

PairMap count_block(const Corpus& corpus, std::size_t first, std::size_t last, const Vocabulary& vocab,
                    std::size_t window, Weighting weighting) {
    PairMap table;
    std::vector<std::uint32_t> ids;
    for (std::size_t d = first; d < last; ++d) {
        ids.clear();
        for (const auto& tok : corpus[d]) {
            if (auto idx = vocab.index(tok)) ids.push_back(static_cast<std::uint32_t>(*idx));
        }
        for (std::size_t p = 0; p < ids.size(); ++p) {
            const std::size_t stop = std::min(ids.size(), p + window + 1);
            for (std::size_t q = p + 1; q < stop; ++q) {
                const std::size_t dist = q - p;
                const double w = weighting == Weighting::inverse_distance ? 1.0 / static_cast<double>(dist) : 1.0;
                auto key = std::minmax(ids[p], ids[q]);
                table[{key.first, key.second}] += w;
            }
        }
    }
    return table;
}

}  // namespace

CooccurrenceTable count_cooccurrence(const Corpus& corpus, const Vocabulary& vocab, std::size_t window,
                                     Weighting weighting, unsigned threads) {
    if (window < 1) throw ValidationError("co-occurrence window must be >= 1");
    if (vocab.empty()) throw ValidationError("co-occurrence counting needs a non-empty vocabulary");

    const std::size_t n_blocks = (corpus.size() + kDocsPerBlock - 1) / kDocsPerBlock;
    std::vector<PairMap> blocks(n_blocks);
    auto run_block = [&](std::size_t b) {
        blocks[b] = count_block(corpus, b * kDocsPerBlock, std::min(corpus.size(), (b + 1) * kDocsPerBlock), vocab,
                                window, weighting);
    };

    threads = std::max(1u, threads);
    if (threads == 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> workers;
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t b = t; b < n_blocks; b += threads) run_block(b);
            });
        }
        for (auto& w : workers) w.join();
    }

    // Merge in block order so that floating-point sums are reproducible.
    PairMap merged;
    for (const auto& block : blocks) {
        for (const auto& [key, w] : block) merged[key] += w;
    }
    std::vector<CooccurrenceEntry> entries;
    entries.reserve(merged.size());
    for (const auto& [key, w] : merged) entries.push_back({key.first, key.second, w});
    return CooccurrenceTable(vocab.size(), std::move(entries));
}

}  // namespace legalqa::textproc
