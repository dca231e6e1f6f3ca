#include "legalqa/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>

#include "legalqa/error.hpp"
#include "legalqa/io.hpp"
#include "random.hpp"

namespace legalqa::embeddings {

std::string_view to_string(Source source) {
    switch (source) {
        case Source::word2vec: return "word2vec";
        case Source::glove: return "glove";
        case Source::external: return "external";
    }
    return "?";
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, Source source)
    : dim_(dim), source_(source), values_(rows * dim, 0.0) {
    if (dim == 0) throw ValidationError("embedding dimension must be >= 1");
}

bool EmbeddingMatrix::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void TrainConfig::validate() const {
    if (dim < 1) throw ValidationError("train config: dim must be >= 1");
    if (window < 1) throw ValidationError("train config: window must be >= 1");
    if (epochs < 1) throw ValidationError("train config: epochs must be >= 1");
    if (negatives < 1) throw ValidationError("train config: negatives must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ValidationError("train config: learning_rate must be > 0");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("train config: alpha must lie in (0, 1]");
    if (!(x_max > 0.0)) throw ValidationError("train config: x_max must be > 0");
}

TrainConfig TrainConfig::word2vec_defaults() {
    TrainConfig c;
    c.dim = 5;
    c.window = 7;
    c.epochs = 15;
    c.learning_rate = 0.025;
    c.negatives = 5;
    return c;
}

TrainConfig TrainConfig::glove_defaults() {
    TrainConfig c;
    c.dim = 5;
    c.window = 10;
    c.epochs = 30;
    c.learning_rate = 0.05;
    c.x_max = 100.0;
    c.alpha = 0.75;
    return c;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// -log sigmoid(x), stable for large |x|.
double neg_log_sigmoid(double x) {
    return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

// Loss and gradients for one positive pair and its negatives. grad_negs holds
// negatives.size() rows of width dim, row-major.
double sgns_kernel(std::span<const double> center, std::span<const double> context,
                   std::span<const std::span<const double>> negatives, std::span<double> grad_center,
                   std::span<double> grad_context, std::span<double> grad_negs) {
    const std::size_t dim = center.size();
    std::fill(grad_center.begin(), grad_center.end(), 0.0);

    const double pos = dot(center, context);
    double loss = neg_log_sigmoid(pos);
    // d/dx -log s(x) = s(x) - 1
    const double g_pos = sigmoid(pos) - 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
        grad_center[k] += g_pos * context[k];
        grad_context[k] = g_pos * center[k];
    }
    for (std::size_t n = 0; n < negatives.size(); ++n) {
        const auto neg = negatives[n];
        const double s = dot(center, neg);
        loss += neg_log_sigmoid(-s);
        // d/dx -log s(-x) = s(x)
        const double g_neg = sigmoid(s);
        for (std::size_t k = 0; k < dim; ++k) {
            grad_center[k] += g_neg * neg[k];
            grad_negs[n * dim + k] = g_neg * center[k];
        }
    }
    return loss;
}

void check_dims(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(got) + ", expected " +
                                std::to_string(expected));
    }
}

}  // namespace

SgnsResult sgns_pair_objective(std::span<const double> center, std::span<const double> context,
                               std::span<const std::span<const double>> negatives) {
    const std::size_t dim = center.size();
    check_dims(dim, context.size(), "context vector");
    for (const auto& n : negatives) check_dims(dim, n.size(), "negative vector");

    SgnsResult r;
    r.grad_center.assign(dim, 0.0);
    r.grad_context.assign(dim, 0.0);
    std::vector<double> negs(negatives.size() * dim, 0.0);
    r.loss = sgns_kernel(center, context, negatives, r.grad_center, r.grad_context, negs);
    for (std::size_t n = 0; n < negatives.size(); ++n) {
        r.grad_negatives.emplace_back(negs.begin() + static_cast<std::ptrdiff_t>(n * dim),
                                      negs.begin() + static_cast<std::ptrdiff_t>((n + 1) * dim));
    }
    return r;
}

// ---------------------------------------------------------------------------
// word2vec

namespace {

std::vector<std::vector<std::uint32_t>> index_corpus(const textproc::Corpus& corpus,
                                                     const textproc::Vocabulary& vocab) {
    std::vector<std::vector<std::uint32_t>> docs;
    docs.reserve(corpus.size());
    for (const auto& doc : corpus) {
        std::vector<std::uint32_t> ids;
        ids.reserve(doc.size());
        for (const auto& tok : doc) {
            if (auto idx = vocab.index(tok)) ids.push_back(static_cast<std::uint32_t>(*idx));
        }
        docs.push_back(std::move(ids));
    }
    return docs;
}

class UnigramSampler {
public:
    explicit UnigramSampler(const textproc::Vocabulary& vocab) {
        cumulative_.reserve(vocab.size());
        double total = 0.0;
        for (auto f : vocab.frequencies()) {
            total += std::pow(static_cast<double>(f), 0.75);
            cumulative_.push_back(total);
        }
        for (auto& c : cumulative_) c /= total;
        cumulative_.back() = 1.0;
    }

    std::uint32_t operator()(detail::Rng& rng) const {
        const double u = detail::uniform01(rng);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        return static_cast<std::uint32_t>(it - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

struct Word2VecState {
    EmbeddingMatrix input;
    EmbeddingMatrix output;
};

// Trains over docs[first, last) with a private RNG. `step` counts processed
// pairs across all workers and drives the learning-rate decay.
double word2vec_pass(const std::vector<std::vector<std::uint32_t>>& docs, std::size_t first, std::size_t last,
                     Word2VecState& state, const UnigramSampler& sampler, const TrainConfig& config,
                     detail::Rng& rng, std::atomic<std::uint64_t>& step, std::uint64_t total_steps,
                     std::uint64_t& pairs_seen) {
    const std::size_t dim = config.dim;
    const std::size_t vocab_size = state.input.rows();
    std::vector<double> grad_center(dim), grad_context(dim), grad_negs(config.negatives * dim);
    std::vector<std::uint32_t> neg_ids(config.negatives);
    std::vector<std::span<const double>> neg_rows(config.negatives);
    double loss_sum = 0.0;

    for (std::size_t d = first; d < last; ++d) {
        const auto& ids = docs[d];
        for (std::size_t p = 0; p < ids.size(); ++p) {
            const std::size_t lo = p >= config.window ? p - config.window : 0;
            const std::size_t hi = std::min(ids.size(), p + config.window + 1);
            for (std::size_t q = lo; q < hi; ++q) {
                if (q == p) continue;
                const auto center = ids[p];
                const auto context = ids[q];

                std::size_t n_neg = 0;
                for (std::size_t k = 0; k < config.negatives; ++k) {
                    // A negative equal to the positive context is redrawn a few times, then dropped.
                    for (int attempt = 0; attempt < 8; ++attempt) {
                        auto cand = sampler(rng);
                        if (cand != context || vocab_size == 1) {
                            if (cand != context) neg_ids[n_neg++] = cand;
                            break;
                        }
                    }
                }
                for (std::size_t k = 0; k < n_neg; ++k) neg_rows[k] = state.output.row(neg_ids[k]);

                const auto t = step.fetch_add(1, std::memory_order_relaxed);
                const double lr = config.learning_rate *
                                  std::max(1e-4, 1.0 - static_cast<double>(t) / static_cast<double>(total_steps));

                loss_sum += sgns_kernel(state.input.row(center), state.output.row(context),
                                        std::span<const std::span<const double>>(neg_rows.data(), n_neg),
                                        grad_center, grad_context, grad_negs);
                ++pairs_seen;

                auto in = state.input.row(center);
                for (std::size_t k = 0; k < dim; ++k) in[k] -= lr * grad_center[k];
                auto out = state.output.row(context);
                for (std::size_t k = 0; k < dim; ++k) out[k] -= lr * grad_context[k];
                for (std::size_t n = 0; n < n_neg; ++n) {
                    auto row = state.output.row(neg_ids[n]);
                    for (std::size_t k = 0; k < dim; ++k) row[k] -= lr * grad_negs[n * dim + k];
                }
            }
        }
    }
    return loss_sum;
}

}  // namespace

EmbeddingMatrix train_word2vec(const textproc::Corpus& corpus, const textproc::Vocabulary& vocab,
                               const TrainConfig& config, TrainLog* log) {
    config.validate();
    if (vocab.empty()) throw ValidationError("word2vec: vocabulary is empty");
    const auto docs = index_corpus(corpus, vocab);

    std::uint64_t pairs_per_epoch = 0;
    for (const auto& ids : docs) {
        for (std::size_t p = 0; p < ids.size(); ++p) {
            const std::size_t lo = p >= config.window ? p - config.window : 0;
            const std::size_t hi = std::min(ids.size(), p + config.window + 1);
            pairs_per_epoch += hi - lo - 1;
        }
    }
    if (pairs_per_epoch == 0) throw ValidationError("word2vec: corpus has no training pairs");
    const std::uint64_t total_steps = pairs_per_epoch * config.epochs;

    detail::Rng rng(config.seed);
    Word2VecState state{EmbeddingMatrix(vocab.size(), config.dim, Source::word2vec),
                        EmbeddingMatrix(vocab.size(), config.dim, Source::word2vec)};
    const double half = 0.5 / static_cast<double>(config.dim);
    for (auto& v : state.input.values()) v = (detail::uniform01(rng) * 2.0 - 1.0) * half;

    const UnigramSampler sampler(vocab);
    std::atomic<std::uint64_t> step{0};
    if (log) log->epoch_mean_loss.clear();

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double loss = 0.0;
        std::uint64_t pairs = 0;
        if (config.threads <= 1) {
            loss = word2vec_pass(docs, 0, docs.size(), state, sampler, config, rng, step, total_steps, pairs);
        } else {
            const unsigned n = config.threads;
            std::vector<double> losses(n, 0.0);
            std::vector<std::uint64_t> counts(n, 0);
            std::vector<std::thread> workers;
            for (unsigned t = 0; t < n; ++t) {
                workers.emplace_back([&, t] {
                    detail::Rng local(config.seed ^ (0x9E3779B97F4A7C15ULL * (t + 1 + epoch * n)));
                    const std::size_t first = docs.size() * t / n;
                    const std::size_t last = docs.size() * (t + 1) / n;
                    losses[t] = word2vec_pass(docs, first, last, state, sampler, config, local, step, total_steps,
                                              counts[t]);
                });
            }
            for (auto& w : workers) w.join();
            for (unsigned t = 0; t < n; ++t) {
                loss += losses[t];
                pairs += counts[t];
            }
        }
        if (log) log->epoch_mean_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    }
    return std::move(state.input);
}

// ---------------------------------------------------------------------------
// GloVe

double glove_weight(double x, double x_max, double alpha) {
    return x >= x_max ? 1.0 : std::pow(x / x_max, alpha);
}

GloveTermResult glove_term_objective(std::span<const double> w, std::span<const double> context, double bias,
                                     double context_bias, double x, double x_max, double alpha) {
    check_dims(w.size(), context.size(), "context vector");
    if (!(x > 0.0)) throw ValidationError("GloVe term needs a positive co-occurrence weight");

    const double f = glove_weight(x, x_max, alpha);
    const double diff = dot(w, context) + bias + context_bias - std::log(x);
    GloveTermResult r;
    r.loss = f * diff * diff;
    const double g = 2.0 * f * diff;
    r.grad_w.resize(w.size());
    r.grad_context.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        r.grad_w[k] = g * context[k];
        r.grad_context[k] = g * w[k];
    }
    r.grad_bias = g;
    r.grad_context_bias = g;
    return r;
}

GloveModel init_glove_model(std::size_t vocab_size, const TrainConfig& config) {
    config.validate();
    GloveModel m{EmbeddingMatrix(vocab_size, config.dim, Source::glove),
                 EmbeddingMatrix(vocab_size, config.dim, Source::glove), std::vector<double>(vocab_size),
                 std::vector<double>(vocab_size)};
    detail::Rng rng(config.seed);
    const double dim = static_cast<double>(config.dim);
    auto draw = [&] { return (detail::uniform01(rng) - 0.5) / dim; };
    for (auto& v : m.word.values()) v = draw();
    for (auto& v : m.context.values()) v = draw();
    for (auto& v : m.bias) v = draw();
    for (auto& v : m.context_bias) v = draw();
    return m;
}

namespace {

struct OrderedEntry {
    std::uint32_t i;
    std::uint32_t j;
    double x;
};

std::vector<OrderedEntry> ordered_entries(const textproc::CooccurrenceTable& cooc) {
    std::vector<OrderedEntry> out;
    out.reserve(cooc.entries().size() * 2);
    for (const auto& e : cooc.entries()) {
        out.push_back({e.i, e.j, e.weight});
        if (e.i != e.j) out.push_back({e.j, e.i, e.weight});
    }
    return out;
}

double glove_term_loss(const GloveModel& m, const OrderedEntry& e, const TrainConfig& config) {
    const double diff = dot(m.word.row(e.i), m.context.row(e.j)) + m.bias[e.i] + m.context_bias[e.j] - std::log(e.x);
    return glove_weight(e.x, config.x_max, config.alpha) * diff * diff;
}

struct AdaGradState {
    std::vector<double> word, context, bias, context_bias;
};

void glove_pass(const std::vector<OrderedEntry>& entries, std::size_t first, std::size_t last, GloveModel& m,
                AdaGradState& sq, const TrainConfig& config) {
    const std::size_t dim = config.dim;
    const double lr = config.learning_rate;
    std::vector<double> gw(dim), gc(dim);
    for (std::size_t n = first; n < last; ++n) {
        const auto& e = entries[n];
        auto w = m.word.row(e.i);
        auto c = m.context.row(e.j);
        const double diff = dot(w, c) + m.bias[e.i] + m.context_bias[e.j] - std::log(e.x);
        const double g = 2.0 * glove_weight(e.x, config.x_max, config.alpha) * diff;
        if (!std::isfinite(g)) continue;

        for (std::size_t k = 0; k < dim; ++k) {
            gw[k] = g * c[k];
            gc[k] = g * w[k];
        }
        double* sw = sq.word.data() + e.i * dim;
        double* sc = sq.context.data() + e.j * dim;
        for (std::size_t k = 0; k < dim; ++k) {
            w[k] -= lr * gw[k] / std::sqrt(sw[k]);
            c[k] -= lr * gc[k] / std::sqrt(sc[k]);
            sw[k] += gw[k] * gw[k];
            sc[k] += gc[k] * gc[k];
        }
        m.bias[e.i] -= lr * g / std::sqrt(sq.bias[e.i]);
        m.context_bias[e.j] -= lr * g / std::sqrt(sq.context_bias[e.j]);
        sq.bias[e.i] += g * g;
        sq.context_bias[e.j] += g * g;
    }
}

}  // namespace

double glove_total_loss(const textproc::CooccurrenceTable& cooc, const GloveModel& model, const TrainConfig& config) {
    double total = 0.0;
    for (const auto& e : ordered_entries(cooc)) total += glove_term_loss(model, e, config);
    return total;
}

void train_glove_model(const textproc::CooccurrenceTable& cooc, GloveModel& model, const TrainConfig& config,
                       TrainLog* log) {
    config.validate();
    if (cooc.empty()) throw ValidationError("GloVe: co-occurrence table is empty");
    if (model.word.rows() < cooc.vocab_size() || model.word.dim() != config.dim) {
        throw DimensionMismatch("GloVe: model shape does not match the table and config");
    }

    auto entries = ordered_entries(cooc);
    const std::size_t vocab = model.word.rows();
    AdaGradState sq{std::vector<double>(vocab * config.dim, 1.0), std::vector<double>(vocab * config.dim, 1.0),
                    std::vector<double>(vocab, 1.0), std::vector<double>(vocab, 1.0)};
    // Separate stream from the initializer so that shuffles do not replay init draws.
    detail::Rng rng(config.seed ^ 0xD1B54A32D192ED03ULL);

    if (log) {
        log->initial_loss = glove_total_loss(cooc, model, config);
        log->epoch_mean_loss.clear();
    }
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        detail::shuffle(entries, rng);
        if (config.threads <= 1) {
            glove_pass(entries, 0, entries.size(), model, sq, config);
        } else {
            const unsigned n = config.threads;
            std::vector<std::thread> workers;
            for (unsigned t = 0; t < n; ++t) {
                workers.emplace_back([&, t] {
                    glove_pass(entries, entries.size() * t / n, entries.size() * (t + 1) / n, model, sq, config);
                });
            }
            for (auto& w : workers) w.join();
        }
        if (log) log->epoch_mean_loss.push_back(glove_total_loss(cooc, model, config));
    }
}

EmbeddingMatrix train_glove(const textproc::CooccurrenceTable& cooc, const TrainConfig& config, TrainLog* log) {
    if (cooc.empty()) throw ValidationError("GloVe: co-occurrence table is empty");
    auto model = init_glove_model(cooc.vocab_size(), config);
    train_glove_model(cooc, model, config, log);
    EmbeddingMatrix out(cooc.vocab_size(), config.dim, Source::glove);
    auto& values = out.values();
    for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = model.word.values()[k] + model.context.values()[k];
    }
    return out;
}

// ---------------------------------------------------------------------------

SentenceVector pool_sentence(std::span<const std::string> tokens, const EmbeddingMatrix& matrix,
                             const textproc::Vocabulary& vocab) {
    SentenceVector out;
    out.values.assign(matrix.dim(), 0.0);
    std::size_t found = 0;
    for (const auto& tok : tokens) {
        auto idx = vocab.index(tok);
        if (!idx || *idx >= matrix.rows()) continue;
        auto row = matrix.row(*idx);
        for (std::size_t k = 0; k < row.size(); ++k) out.values[k] += row[k];
        ++found;
    }
    if (found > 0) {
        for (auto& v : out.values) v /= static_cast<double>(found);
        out.coverage = static_cast<double>(found) / static_cast<double>(tokens.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Embedding files

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
        out.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

ExternalEmbeddings parse_embedding_file(std::string_view text, const std::string& source) {
    ExternalEmbeddings out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    std::size_t expected_count = 0;
    bool have_header = false;

    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;

        auto fields = split_spaces(line);
        if (fields.empty()) continue;

        if (!have_header) {
            if (fields.size() != 2 || !parse_number(fields[0], expected_count) || !parse_number(fields[1], out.dim)) {
                throw ParseError(source, line_no, "expected header '<count> <dim>'");
            }
            if (out.dim == 0 && expected_count > 0) throw ParseError(source, line_no, "dimension must be >= 1");
            have_header = true;
            continue;
        }
        if (fields.size() != out.dim + 1) {
            throw DimensionMismatch(source + ":" + std::to_string(line_no) + ": entry '" + std::string(fields[0]) +
                                    "' has dimension " + std::to_string(fields.size() - 1) + ", expected " +
                                    std::to_string(out.dim));
        }
        Vector v(out.dim);
        for (std::size_t k = 0; k < out.dim; ++k) {
            if (!parse_number(fields[k + 1], v[k]) || !std::isfinite(v[k])) {
                throw ParseError(source, line_no, "non-numeric value '" + std::string(fields[k + 1]) + "'");
            }
        }
        std::string id(fields[0]);
        if (!out.vectors.emplace(id, std::move(v)).second) {
            throw ValidationError(source + ":" + std::to_string(line_no) + ": duplicate id '" + id + "'");
        }
        if (out.vectors.size() > expected_count) {
            throw ParseError(source, line_no, "more entries than the header count " + std::to_string(expected_count));
        }
    }
    if (have_header && out.vectors.size() != expected_count) {
        throw ParseError(source, line_no + 1,
                         "truncated file: header declares " + std::to_string(expected_count) + " entries, found " +
                             std::to_string(out.vectors.size()));
    }
    return out;
}

ExternalEmbeddings load_external_embeddings(const std::filesystem::path& path) {
    return parse_embedding_file(io::read_file(path), path.string());
}

std::string format_embedding_file(const ExternalEmbeddings& embeddings) {
    std::string out = std::to_string(embeddings.vectors.size()) + " " + std::to_string(embeddings.dim) + "\n";
    char buf[64];
    for (const auto& [id, v] : embeddings.vectors) {
        if (id.empty() || id.find_first_of(" \t\r\n") != std::string::npos) {
            throw ValidationError("embedding id '" + id + "' is empty or contains whitespace");
        }
        out += id;
        for (double x : v) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
            out += ' ';
            out.append(buf, ptr);
        }
        out += '\n';
    }
    return out;
}

void save_embeddings(const ExternalEmbeddings& embeddings, const std::filesystem::path& path) {
    io::write_file_atomic(path, format_embedding_file(embeddings));
}

ExternalEmbeddings to_keyed(const EmbeddingMatrix& matrix, const textproc::Vocabulary& vocab) {
    if (matrix.rows() != vocab.size()) throw DimensionMismatch("matrix rows do not match the vocabulary size");
    ExternalEmbeddings out;
    out.dim = matrix.dim();
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        auto row = matrix.row(i);
        out.vectors.emplace(vocab.token(i), Vector(row.begin(), row.end()));
    }
    return out;
}

EmbeddingMatrix from_keyed(const ExternalEmbeddings& keyed, const textproc::Vocabulary& vocab, Source source) {
    EmbeddingMatrix out(vocab.size(), keyed.dim, source);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        auto it = keyed.vectors.find(vocab.token(i));
        if (it == keyed.vectors.end()) throw ValidationError("no vector for vocabulary token '" + vocab.token(i) + "'");
        std::copy(it->second.begin(), it->second.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace legalqa::embeddings
