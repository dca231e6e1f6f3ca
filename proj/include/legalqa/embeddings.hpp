#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalqa/textproc.hpp"

namespace legalqa::embeddings {

using Vector = std::vector<double>;

enum class Source { word2vec, glove, external };

std::string_view to_string(Source source);

// Row-major rows x dim matrix of finite reals.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t rows, std::size_t dim, Source source);

    std::size_t rows() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    Source source() const { return source_; }

    std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool all_finite() const;
    bool operator==(const EmbeddingMatrix&) const = default;

private:
    std::size_t dim_ = 0;
    Source source_ = Source::word2vec;
    std::vector<double> values_;
};

struct TrainConfig {
    std::size_t dim = 5;
    std::size_t window = 7;
    std::size_t epochs = 15;
    double learning_rate = 0.025;
    std::size_t negatives = 5;  // word2vec only
    double x_max = 100.0;       // GloVe only
    double alpha = 0.75;        // GloVe only
    std::uint64_t seed = 1;
    unsigned threads = 1;  // > 1 enables racy parallel updates (not reproducible)

    // Throws ValidationError on violated invariants.
    void validate() const;

    static TrainConfig word2vec_defaults();
    static TrainConfig glove_defaults();
};

// ---------------------------------------------------------------------------
// Skip-gram with negative sampling

struct SgnsResult {
    double loss = 0.0;
    Vector grad_center;
    Vector grad_context;
    std::vector<Vector> grad_negatives;
};

// L = -log s(c.o) - sum_k log s(-c.n_k) with its analytic gradients.
SgnsResult sgns_pair_objective(std::span<const double> center, std::span<const double> context,
                               std::span<const std::span<const double>> negatives);

// Per-epoch diagnostics filled by the trainers when requested.
struct TrainLog {
    double initial_loss = 0.0;             // GloVe: objective before the first update
    std::vector<double> epoch_mean_loss;   // word2vec: mean pair loss; GloVe: total objective after epoch
};

// Skip-gram with negative sampling. Each epoch visits every (center, context)
// pair within the window; negatives come from the unigram^0.75 distribution.
// The learning rate decays linearly to 1e-4 of its initial value.
EmbeddingMatrix train_word2vec(const textproc::Corpus& corpus, const textproc::Vocabulary& vocab,
                               const TrainConfig& config, TrainLog* log = nullptr);

// ---------------------------------------------------------------------------
// GloVe

struct GloveTermResult {
    double loss = 0.0;
    Vector grad_w;
    Vector grad_context;
    double grad_bias = 0.0;
    double grad_context_bias = 0.0;
};

// f(x) = (x / x_max)^alpha, capped at 1.
double glove_weight(double x, double x_max, double alpha);

// f(X_ij) (w_i . w~_j + b_i + b~_j - log X_ij)^2 with analytic gradients.
GloveTermResult glove_term_objective(std::span<const double> w, std::span<const double> context, double bias,
                                     double context_bias, double x, double x_max, double alpha);

struct GloveModel {
    EmbeddingMatrix word;
    EmbeddingMatrix context;
    std::vector<double> bias;
    std::vector<double> context_bias;
};

// Uniform (-0.5/dim, 0.5/dim) initialization from the seed.
GloveModel init_glove_model(std::size_t vocab_size, const TrainConfig& config);

// Total weighted objective over both orientations of every stored pair
// (diagonal entries once).
double glove_total_loss(const textproc::CooccurrenceTable& cooc, const GloveModel& model, const TrainConfig& config);

// Runs config.epochs AdaGrad passes over a seeded shuffle of the ordered
// entries, updating `model` in place.
void train_glove_model(const textproc::CooccurrenceTable& cooc, GloveModel& model, const TrainConfig& config,
                       TrainLog* log = nullptr);

// init + train; returns word + context vectors.
EmbeddingMatrix train_glove(const textproc::CooccurrenceTable& cooc, const TrainConfig& config,
                            TrainLog* log = nullptr);

// ---------------------------------------------------------------------------
// Pooling and external vectors

struct SentenceVector {
    Vector values;
    double coverage = 0.0;  // in-vocabulary fraction of the tokens
};

// Mean of the in-vocabulary token vectors; zero vector when none is known.
SentenceVector pool_sentence(std::span<const std::string> tokens, const EmbeddingMatrix& matrix,
                             const textproc::Vocabulary& vocab);

struct ExternalEmbeddings {
    std::size_t dim = 0;
    std::map<std::string, Vector> vectors;
};

// Text format: "<count> <dim>" header, then "<id> <v1> ... <v_dim>" lines.
ExternalEmbeddings parse_embedding_file(std::string_view text, const std::string& source);
ExternalEmbeddings load_external_embeddings(const std::filesystem::path& path);

std::string format_embedding_file(const ExternalEmbeddings& embeddings);
void save_embeddings(const ExternalEmbeddings& embeddings, const std::filesystem::path& path);

// Word matrix keyed by vocabulary tokens, for writing trained vectors.
ExternalEmbeddings to_keyed(const EmbeddingMatrix& matrix, const textproc::Vocabulary& vocab);
// Inverse of to_keyed: rows follow the vocabulary order. Throws when a token
// has no vector.
EmbeddingMatrix from_keyed(const ExternalEmbeddings& keyed, const textproc::Vocabulary& vocab, Source source);

}  // namespace legalqa::embeddings
