#include "legalqa/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "legalqa/error.hpp"
#include "legalqa/io.hpp"
#include "legalqa/textproc.hpp"

namespace legalqa::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(System system) {
    switch (system) {
        case System::word2vec_cosine: return "word2vec-cosine";
        case System::glove_cosine: return "glove-cosine";
        case System::transformer_cosine: return "transformer-cosine";
        case System::transformer_euclidean: return "transformer-euclidean";
        case System::transformer_manhattan: return "transformer-manhattan";
    }
    return "?";
}

System parse_system(std::string_view name) {
    for (auto s : {System::word2vec_cosine, System::glove_cosine, System::transformer_cosine,
                   System::transformer_euclidean, System::transformer_manhattan}) {
        if (to_string(s) == name) return s;
    }
    throw ValidationError("unknown system '" + std::string(name) +
                          "' (expected word2vec-cosine, glove-cosine, transformer-cosine, transformer-euclidean or "
                          "transformer-manhattan)");
}

scoring::Metric metric_of(System system) {
    switch (system) {
        case System::transformer_euclidean: return scoring::Metric::euclidean;
        case System::transformer_manhattan: return scoring::Metric::manhattan;
        default: return scoring::Metric::cosine;
    }
}

bool is_transformer(System system) {
    return system != System::word2vec_cosine && system != System::glove_cosine;
}

const std::optional<fs::path>& Paths::split_path(corpus::Split split) const {
    switch (split) {
        case corpus::Split::train: return train;
        case corpus::Split::dev: return dev;
        case corpus::Split::test: return test;
    }
    return train;
}

// ---------------------------------------------------------------------------
// RunConfig

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError("config: '" + where + "' must be an object");
    for (const auto& item : obj.items()) {
        bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
        if (!known) throw ValidationError("config: unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

labeling::Mode mode_for(System system) {
    return scoring::is_distance(metric_of(system)) ? labeling::Mode::distance : labeling::Mode::similarity;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) try {
    check_keys(j, {"system", "seed", "paths", "rule", "train_config", "summary", "embedding_splits", "min_count"},
               "config");
    RunConfig c;
    if (auto it = j.find("system"); it != j.end()) c.system = parse_system(it->get<std::string>());
    read_opt(j, "seed", c.seed);
    read_opt(j, "min_count", c.min_count);

    c.train_config = c.system == System::glove_cosine ? embeddings::TrainConfig::glove_defaults()
                                                      : embeddings::TrainConfig::word2vec_defaults();
    c.rule.mode = mode_for(c.system);
    // Plain argmax for transformer-cosine; every other system uses the replacement rule.
    c.rule.replacement_enabled = c.system != System::transformer_cosine;

    if (auto it = j.find("paths"); it != j.end()) {
        check_keys(*it, {"train", "dev", "test", "embeddings_dir", "summaries_dir", "output_dir"}, "paths");
        for (auto [key, slot] : {std::pair{"train", &c.paths.train}, std::pair{"dev", &c.paths.dev},
                                 std::pair{"test", &c.paths.test}}) {
            if (auto p = it->find(key); p != it->end() && !p->is_null()) *slot = fs::path(p->get<std::string>());
        }
        auto read_dir = [&](const char* key, fs::path& slot) {
            std::string s;
            read_opt(*it, key, s);
            if (!s.empty()) slot = s;
        };
        read_dir("embeddings_dir", c.paths.embeddings_dir);
        read_dir("summaries_dir", c.paths.summaries_dir);
        read_dir("output_dir", c.paths.output_dir);
    }
    if (auto it = j.find("rule"); it != j.end()) {
        check_keys(*it, {"mode", "replacement", "epsilon", "delta"}, "rule");
        if (auto m = it->find("mode"); m != it->end()) {
            const auto name = m->get<std::string>();
            if (name != "similarity" && name != "distance") {
                throw ValidationError("config: unknown rule mode '" + name + "'");
            }
            const auto mode = name == "similarity" ? labeling::Mode::similarity : labeling::Mode::distance;
            if (mode != c.rule.mode) {
                throw ValidationError("config: rule mode '" + name + "' does not match system " +
                                      std::string(to_string(c.system)));
            }
        }
        read_opt(*it, "replacement", c.rule.replacement_enabled);
        read_opt(*it, "epsilon", c.rule.epsilon);
        read_opt(*it, "delta", c.rule.delta);
    }
    if (auto it = j.find("train_config"); it != j.end()) {
        check_keys(*it, {"dim", "window", "epochs", "learning_rate", "negatives", "x_max", "alpha", "threads"},
                   "train_config");
        auto& t = c.train_config;
        read_opt(*it, "dim", t.dim);
        read_opt(*it, "window", t.window);
        read_opt(*it, "epochs", t.epochs);
        read_opt(*it, "learning_rate", t.learning_rate);
        read_opt(*it, "negatives", t.negatives);
        read_opt(*it, "x_max", t.x_max);
        read_opt(*it, "alpha", t.alpha);
        read_opt(*it, "threads", t.threads);
    }
    if (auto it = j.find("summary"); it != j.end()) {
        check_keys(*it, {"level1_segment_tokens", "level2_segment_tokens", "joiner", "ratio", "command"}, "summary");
        read_opt(*it, "level1_segment_tokens", c.summary_spec.level1_segment_tokens);
        read_opt(*it, "level2_segment_tokens", c.summary_spec.level2_segment_tokens);
        read_opt(*it, "joiner", c.summary_spec.joiner);
        read_opt(*it, "ratio", c.summary_spec.per_segment_output_ratio);
        read_opt(*it, "command", c.summarizer_command);
    }
    if (auto it = j.find("embedding_splits"); it != j.end()) {
        c.embedding_splits.clear();
        for (const auto& s : *it) c.embedding_splits.push_back(corpus::parse_split(s.get<std::string>()));
    }
    c.train_config.seed = c.seed;
    c.validate();
    return c;
} catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
}

json RunConfig::to_json() const {
    json paths_json = {{"embeddings_dir", paths.embeddings_dir.string()},
                       {"summaries_dir", paths.summaries_dir.string()},
                       {"output_dir", paths.output_dir.string()}};
    if (paths.train) paths_json["train"] = paths.train->string();
    if (paths.dev) paths_json["dev"] = paths.dev->string();
    if (paths.test) paths_json["test"] = paths.test->string();
    json splits = json::array();
    for (auto s : embedding_splits) splits.push_back(std::string(corpus::to_string(s)));
    return {{"system", std::string(to_string(system))},
            {"seed", seed},
            {"min_count", min_count},
            {"paths", paths_json},
            {"rule",
             {{"mode", std::string(labeling::to_string(rule.mode))},
              {"replacement", rule.replacement_enabled},
              {"epsilon", rule.epsilon},
              {"delta", rule.delta}}},
            {"train_config",
             {{"dim", train_config.dim},
              {"window", train_config.window},
              {"epochs", train_config.epochs},
              {"learning_rate", train_config.learning_rate},
              {"negatives", train_config.negatives},
              {"x_max", train_config.x_max},
              {"alpha", train_config.alpha},
              {"threads", train_config.threads}}},
            {"summary",
             {{"level1_segment_tokens", summary_spec.level1_segment_tokens},
              {"level2_segment_tokens", summary_spec.level2_segment_tokens},
              {"joiner", summary_spec.joiner},
              {"ratio", summary_spec.per_segment_output_ratio},
              {"command", summarizer_command}}},
            {"embedding_splits", splits}};
}

void RunConfig::validate() const {
    if (rule.mode != mode_for(system)) {
        throw ValidationError("rule mode " + std::string(labeling::to_string(rule.mode)) +
                              " is inconsistent with system " + std::string(to_string(system)));
    }
    rule.validate();
    train_config.validate();
    summary_spec.validate();
    if (min_count < 1) throw ValidationError("min_count must be >= 1");
}

RunConfig load_run_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
    return RunConfig::from_json(j);
}

// ---------------------------------------------------------------------------
// Layout

fs::path summaries_split_dir(const RunConfig& config, corpus::Split split) {
    return config.paths.summaries_dir / std::string(corpus::to_string(split));
}

fs::path texts_file(const RunConfig& config, corpus::Split split) {
    return summaries_split_dir(config, split) / "texts.jsonl";
}

fs::path word_vectors_file(const RunConfig& config) {
    return config.paths.embeddings_dir /
           (config.system == System::glove_cosine ? "glove.vec" : "word2vec.vec");
}

fs::path vocab_file(const RunConfig& config) {
    return config.paths.embeddings_dir /
           (config.system == System::glove_cosine ? "glove.vocab.tsv" : "word2vec.vocab.tsv");
}

fs::path transformer_vectors_file(const RunConfig& config, corpus::Split split) {
    return config.paths.embeddings_dir / ("transformer-" + std::string(corpus::to_string(split)) + ".vec");
}

std::string run_stem(const RunConfig& config, corpus::Split split) {
    std::string stem(to_string(config.system));
    if (!config.rule.replacement_enabled) stem += "-norepl";
    return stem + "-" + std::string(corpus::to_string(split));
}

namespace {

corpus::Dataset load_configured_split(const RunConfig& config, corpus::Split split) {
    const auto& path = config.paths.split_path(split);
    if (!path) throw ValidationError("no path configured for the " + std::string(corpus::to_string(split)) + " split");
    if (!fs::exists(*path)) throw ValidationError("dataset file not found: " + path->string());
    return corpus::load_split(*path, split);
}

std::unique_ptr<summarizer::Backend> make_backend(const RunConfig& config) {
    if (!config.summarizer_command.empty()) {
        return std::make_unique<summarizer::ExternalBackend>(config.summarizer_command);
    }
    return std::make_unique<summarizer::ExtractiveBackend>(config.summary_spec.per_segment_output_ratio);
}

std::string json_line(const json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace

// ---------------------------------------------------------------------------
// prepare

std::size_t cmd_prepare(const RunConfig& config, std::span<const corpus::Split> splits, std::ostream& log) {
    config.validate();
    // Validate every input before touching outputs.
    std::vector<std::pair<corpus::Split, corpus::Dataset>> datasets;
    for (auto split : splits) {
        try {
            datasets.emplace_back(split, load_configured_split(config, split));
        } catch (const EmptyDatasetError&) {
            log << "prepare: " << corpus::to_string(split) << " split is empty, nothing to summarize\n";
        }
    }

    auto backend = make_backend(config);
    std::size_t written = 0;
    for (const auto& [split, dataset] : datasets) {
        const auto final_dir = summaries_split_dir(config, split);
        auto staging = final_dir;
        staging += ".staging";
        fs::remove_all(staging);
        fs::create_directories(staging);
        try {
            std::string texts;
            for (const auto& group : corpus::group_by_question(dataset)) {
                if (group.explanation_text.find_first_not_of(" \t\r\n") == std::string::npos) {
                    log << "warning: question " << group.question_id << " has no explanation; summary is empty\n";
                }
                auto rec = summarizer::summarize_segmentwise(group.explanation_text, config.summary_spec, *backend,
                                                             group.question_id);
                summarizer::save_summary(rec, staging);
                texts += json_line({{"id", group.question_id}, {"kind", "question"}, {"text", group.question_text}});
                for (const auto& cand : group.candidates) {
                    texts += json_line({{"id", cand.candidate_id}, {"kind", "answer"}, {"text", cand.answer_text}});
                }
                texts += json_line(
                    {{"id", scoring::summary_id(group.question_id)}, {"kind", "summary"}, {"text", rec.final_summary}});
                ++written;
            }
            io::write_file_atomic(staging / "texts.jsonl", texts);
        } catch (...) {
            std::error_code ec;
            fs::remove_all(staging, ec);
            throw;
        }
        fs::remove_all(final_dir);
        fs::rename(staging, final_dir);
        log << "prepare: " << corpus::to_string(split) << ": " << dataset.records.size() << " questions, "
            << dataset.candidate_count << " candidates -> " << final_dir.string() << "\n";
    }
    return written;
}

// ---------------------------------------------------------------------------
// train-embeddings

namespace {

std::map<std::string, summarizer::SummaryRecord> load_summaries(const RunConfig& config, corpus::Split split,
                                                                const corpus::Dataset& dataset) {
    const auto dir = summaries_split_dir(config, split);
    std::map<std::string, summarizer::SummaryRecord> out;
    for (const auto& rec : dataset.records) {
        const auto file = dir / (rec.question_id + ".json");
        if (!fs::exists(file)) {
            throw ValidationError("summary missing for question " + rec.question_id + " (" + file.string() +
                                  "); run `legalqa prepare` first");
        }
        out.emplace(rec.question_id, summarizer::load_summary(file));
    }
    return out;
}

}  // namespace

void cmd_train_embeddings(const RunConfig& config, std::ostream& log) {
    config.validate();
    if (is_transformer(config.system)) {
        throw ValidationError("system " + std::string(to_string(config.system)) +
                              " uses exported transformer vectors; run the embedding exporter instead");
    }

    textproc::Corpus corpus;
    for (auto split : config.embedding_splits) {
        if (!config.paths.split_path(split)) continue;
        corpus::Dataset dataset;
        try {
            dataset = load_configured_split(config, split);
        } catch (const EmptyDatasetError&) {
            continue;
        }
        const auto summaries = load_summaries(config, split, dataset);
        for (const auto& group : dataset.records) {
            corpus.push_back(textproc::tokenize(group.question_text));
            for (const auto& cand : group.candidates) corpus.push_back(textproc::tokenize(cand.answer_text));
            corpus.push_back(textproc::tokenize(summaries.at(group.question_id).final_summary));
        }
    }
    if (corpus.empty()) throw ValidationError("train-embeddings: no training text found in the configured splits");

    const auto vocab = textproc::build_vocab(corpus, config.min_count);
    embeddings::EmbeddingMatrix matrix;
    embeddings::TrainLog train_log;
    if (config.system == System::glove_cosine) {
        const auto cooc = textproc::count_cooccurrence(corpus, vocab, config.train_config.window,
                                                       textproc::Weighting::inverse_distance,
                                                       std::max(1u, config.train_config.threads));
        matrix = embeddings::train_glove(cooc, config.train_config, &train_log);
        log << "glove: " << vocab.size() << " tokens, " << cooc.entries().size()
            << " co-occurring pairs, objective " << train_log.initial_loss << " -> "
            << train_log.epoch_mean_loss.back() << "\n";
    } else {
        matrix = embeddings::train_word2vec(corpus, vocab, config.train_config, &train_log);
        log << "word2vec: " << vocab.size() << " tokens, mean pair loss " << train_log.epoch_mean_loss.front()
            << " -> " << train_log.epoch_mean_loss.back() << "\n";
    }

    fs::create_directories(config.paths.embeddings_dir);
    embeddings::save_embeddings(embeddings::to_keyed(matrix, vocab), word_vectors_file(config));
    vocab.save(vocab_file(config));
    log << "wrote " << word_vectors_file(config).string() << "\n";
}

// ---------------------------------------------------------------------------
// scoring

ScoredSplit score_split(const RunConfig& config, corpus::Split split) {
    config.validate();
    ScoredSplit out;
    out.dataset = load_configured_split(config, split);
    const auto summaries = load_summaries(config, split, out.dataset);

    scoring::VectorTable vectors;
    if (is_transformer(config.system)) {
        const auto file = transformer_vectors_file(config, split);
        if (!fs::exists(file)) {
            throw ValidationError("transformer vectors not found at " + file.string() +
                                  "; run the embedding exporter on " + texts_file(config, split).string() +
                                  " to produce them");
        }
        auto ext = embeddings::load_external_embeddings(file);
        for (auto& [id, v] : ext.vectors) vectors.emplace(id, std::move(v));
    } else {
        const auto vec_file = word_vectors_file(config);
        const auto voc_file = vocab_file(config);
        if (!fs::exists(vec_file) || !fs::exists(voc_file)) {
            throw ValidationError("word vectors not found at " + vec_file.string() +
                                  "; run `legalqa train-embeddings` first");
        }
        const auto vocab = textproc::Vocabulary::load(voc_file);
        const auto source =
            config.system == System::glove_cosine ? embeddings::Source::glove : embeddings::Source::word2vec;
        const auto matrix =
            embeddings::from_keyed(embeddings::load_external_embeddings(vec_file), vocab, source);
        auto pool = [&](const std::string& text) {
            const auto tokens = textproc::tokenize(text);
            return embeddings::pool_sentence(tokens, matrix, vocab).values;
        };
        for (const auto& group : out.dataset.records) {
            vectors.emplace(group.question_id, pool(group.question_text));
            vectors.emplace(scoring::summary_id(group.question_id), pool(summaries.at(group.question_id).final_summary));
            for (const auto& cand : group.candidates) vectors.emplace(cand.candidate_id, pool(cand.answer_text));
        }
    }

    const auto metric = metric_of(config.system);
    for (const auto& group : out.dataset.records) {
        auto recs = scoring::score_candidates(group, vectors, summaries.at(group.question_id), metric);
        out.scores.insert(out.scores.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
    return out;
}

evaluation::GoldLabels gold_labels(const corpus::Dataset& dataset) {
    evaluation::GoldLabels golds;
    for (const auto& rec : dataset.records) {
        for (const auto& cand : rec.candidates) {
            if (cand.gold_label) golds[cand.candidate_id] = *cand.gold_label;
        }
    }
    return golds;
}

// ---------------------------------------------------------------------------
// predict / evaluate / sweep

namespace {

json run_metadata(const RunConfig& config, corpus::Split split) {
    return {{"system", std::string(to_string(config.system))},
            {"split", std::string(corpus::to_string(split))},
            {"seed", config.seed},
            {"rule",
             {{"mode", std::string(labeling::to_string(config.rule.mode))},
              {"replacement", config.rule.replacement_enabled},
              {"epsilon", config.rule.epsilon},
              {"delta", config.rule.delta}}},
            {"config", config.to_json()}};
}

}  // namespace

PredictOutcome cmd_predict(const RunConfig& config, corpus::Split split, std::ostream& log) {
    auto scored = score_split(config, split);

    PredictOutcome out;
    out.predictions = labeling::label_all(scored.scores, config.rule);
    out.predictions.validate();

    fs::create_directories(config.paths.output_dir);
    const auto stem = run_stem(config, split);
    out.predictions_file = config.paths.output_dir / (stem + "-predictions.csv");
    out.scores_file = config.paths.output_dir / (stem + "-scores.csv");
    io::write_file_atomic(out.predictions_file, labeling::format_predictions_csv(out.predictions));
    io::write_file_atomic(out.scores_file, scoring::format_scores_csv(scored.scores));
    log << "predict: wrote " << out.predictions_file.string() << "\n";

    if (scored.dataset.has_gold_labels()) {
        const auto golds = gold_labels(scored.dataset);
        out.report = evaluation::evaluate(out.predictions, golds);
        out.distribution = evaluation::distribution_table(scored.scores, out.predictions, golds);

        auto report_json = run_metadata(config, split);
        report_json["metrics"] = evaluation::to_json(*out.report);
        report_json["distribution"] = evaluation::to_json(*out.distribution);
        io::write_file_atomic(config.paths.output_dir / (stem + "-report.json"), report_json.dump(2) + "\n");

        std::string text = evaluation::format_report(std::string(to_string(config.system)), *out.report);
        text += "\n" + evaluation::format_distribution(std::string(corpus::to_string(split)) + " set counts:",
                                                       *out.distribution);
        io::write_file_atomic(config.paths.output_dir / (stem + "-report.txt"), text);
        log << text;
    } else {
        log << "predict: " << corpus::to_string(split) << " split has no gold labels; report skipped\n";
    }
    return out;
}

EvaluateOutcome cmd_evaluate(const RunConfig& config, corpus::Split split, const fs::path& predictions_file,
                             const std::optional<fs::path>& scores_file, std::ostream& log) {
    const auto dataset = load_configured_split(config, split);
    if (!dataset.has_gold_labels()) {
        throw ValidationError("the " + std::string(corpus::to_string(split)) + " split has no gold labels");
    }
    const auto preds =
        labeling::parse_predictions_csv(io::read_file(predictions_file), predictions_file.string());
    const auto golds = gold_labels(dataset);

    EvaluateOutcome out;
    out.report = evaluation::evaluate(preds, golds);
    std::string text = evaluation::format_report(predictions_file.filename().string(), out.report);
    if (scores_file) {
        const auto scores = scoring::parse_scores_csv(io::read_file(*scores_file), scores_file->string());
        out.distribution = evaluation::distribution_table(scores, preds, golds);
        text += "\n" + evaluation::format_distribution(std::string(corpus::to_string(split)) + " set counts:",
                                                       *out.distribution);
    }
    log << text;
    return out;
}

evaluation::ThresholdSweep cmd_sweep(const RunConfig& config, std::span<const corpus::Split> splits,
                                     std::span<const double> grid, std::ostream& log) {
    if (grid.empty()) throw ValidationError("sweep: the threshold grid is empty");
    if (splits.empty()) throw ValidationError("sweep: no splits selected");
    for (double t : grid) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("sweep: thresholds must be finite and >= 0");
    }

    std::vector<scoring::SimilarityRecord> scores;
    evaluation::GoldLabels golds;
    for (auto split : splits) {
        auto scored = score_split(config, split);
        if (!scored.dataset.has_gold_labels()) {
            throw ValidationError("sweep: the " + std::string(corpus::to_string(split)) + " split has no gold labels");
        }
        auto g = gold_labels(scored.dataset);
        golds.insert(g.begin(), g.end());
        scores.insert(scores.end(), scored.scores.begin(), scored.scores.end());
    }

    auto sweep = evaluation::sweep_rule_threshold(scores, golds, config.rule, grid);
    const std::string parameter = config.rule.mode == labeling::Mode::similarity ? "epsilon" : "delta";

    std::string stem(to_string(config.system));
    for (auto split : splits) stem += "-" + std::string(corpus::to_string(split));
    fs::create_directories(config.paths.output_dir);
    json j = evaluation::to_json(sweep);
    j["parameter"] = parameter;
    j["system"] = std::string(to_string(config.system));
    j["seed"] = config.seed;
    io::write_file_atomic(config.paths.output_dir / (stem + "-sweep.json"), j.dump(2) + "\n");
    const auto text = evaluation::format_sweep(parameter, sweep);
    io::write_file_atomic(config.paths.output_dir / (stem + "-sweep.txt"), text);
    log << text;
    return sweep;
}

std::vector<double> parse_grid(std::string_view spec) {
    auto number = [&](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
            throw ValidationError("grid: invalid number '" + std::string(s) + "'");
        }
        return v;
    };

    std::vector<double> grid;
    if (spec.find(':') != std::string_view::npos) {
        auto a = spec.find(':');
        auto b = spec.find(':', a + 1);
        if (b == std::string_view::npos) throw ValidationError("grid range must be start:stop:step");
        const double start = number(spec.substr(0, a));
        const double stop = number(spec.substr(a + 1, b - a - 1));
        const double step = number(spec.substr(b + 1));
        if (!(step > 0.0) || stop < start) throw ValidationError("grid range needs step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t k = 0; k < n; ++k) grid.push_back(start + static_cast<double>(k) * step);
        return grid;
    }
    std::size_t pos = 0;
    while (pos <= spec.size() && !spec.empty()) {
        auto comma = spec.find(',', pos);
        auto item = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        grid.push_back(number(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return grid;
}

}  // namespace legalqa::pipeline
