// legalqa: unsupervised answer selection for legal multiple-choice questions.
//
// Exit codes: 0 success, 1 validation/usage error, 2 runtime error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "legalqa/error.hpp"
#include "legalqa/io.hpp"
#include "legalqa/pipeline.hpp"

namespace {

using legalqa::corpus::Split;
using nlohmann::json;

struct CommonOptions {
    std::string config_file;
    std::string system;
    std::optional<std::uint64_t> seed;
    std::string train, dev, test;
    std::string embeddings_dir, summaries_dir, output_dir;
    bool no_replacement = false;
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::string summarizer_command;
    std::optional<unsigned> threads;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("-c,--config", o.config_file, "JSON run configuration");
    cmd.add_option("--system", o.system,
                   "word2vec-cosine | glove-cosine | transformer-cosine | transformer-euclidean | transformer-manhattan");
    cmd.add_option("--seed", o.seed, "random seed for embedding training");
    cmd.add_option("--train", o.train, "train split (.jsonl or .csv)");
    cmd.add_option("--dev", o.dev, "dev split (.jsonl or .csv)");
    cmd.add_option("--test", o.test, "test split (.jsonl or .csv)");
    cmd.add_option("--embeddings-dir", o.embeddings_dir, "directory for embedding files");
    cmd.add_option("--summaries-dir", o.summaries_dir, "directory for cached summaries");
    cmd.add_option("--output-dir", o.output_dir, "directory for predictions and reports");
    cmd.add_flag("--no-replacement", o.no_replacement, "label the top-scoring answer without runner-up replacement");
    cmd.add_option("--epsilon", o.epsilon, "similarity replacement threshold");
    cmd.add_option("--delta", o.delta, "distance replacement threshold");
    cmd.add_option("--summarizer-command", o.summarizer_command, "external JSONL summarizer command");
    cmd.add_option("--threads", o.threads, "trainer threads (>1 is not reproducible)");
}

// Flags override values from the config file.
legalqa::pipeline::RunConfig resolve(const CommonOptions& o) {
    json j = json::object();
    if (!o.config_file.empty()) {
        try {
            j = json::parse(legalqa::io::read_file(o.config_file));
        } catch (const json::parse_error& e) {
            throw legalqa::ParseError(o.config_file, 0, e.what());
        }
    }
    json patch = json::object();
    if (!o.system.empty()) patch["system"] = o.system;
    if (o.seed) patch["seed"] = *o.seed;
    auto set_path = [&](const char* key, const std::string& value) {
        if (!value.empty()) patch["paths"][key] = value;
    };
    set_path("train", o.train);
    set_path("dev", o.dev);
    set_path("test", o.test);
    set_path("embeddings_dir", o.embeddings_dir);
    set_path("summaries_dir", o.summaries_dir);
    set_path("output_dir", o.output_dir);
    if (o.no_replacement) patch["rule"]["replacement"] = false;
    if (o.epsilon) patch["rule"]["epsilon"] = *o.epsilon;
    if (o.delta) patch["rule"]["delta"] = *o.delta;
    if (!o.summarizer_command.empty()) patch["summary"]["command"] = o.summarizer_command;
    if (o.threads) patch["train_config"]["threads"] = *o.threads;
    j.merge_patch(patch);
    return legalqa::pipeline::RunConfig::from_json(j);
}

std::vector<Split> to_splits(const std::vector<std::string>& names) {
    std::vector<Split> out;
    for (const auto& n : names) out.push_back(legalqa::corpus::parse_split(n));
    return out;
}

std::vector<Split> configured_splits(const legalqa::pipeline::RunConfig& config) {
    std::vector<Split> out;
    for (auto s : {Split::train, Split::dev, Split::test}) {
        if (config.paths.split_path(s)) out.push_back(s);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised answer selection for legal multiple-choice questions"};
    app.require_subcommand(1);

    CommonOptions opts;

    auto* prepare = app.add_subcommand("prepare", "summarize explanations segment-wise and cache them");
    add_common(*prepare, opts);
    std::vector<std::string> prepare_splits;
    prepare->add_option("--split", prepare_splits, "splits to summarize (default: all configured)");

    auto* train = app.add_subcommand("train-embeddings", "train word2vec or GloVe vectors");
    add_common(*train, opts);

    auto* predict = app.add_subcommand("predict", "score, label and (with gold labels) evaluate one split");
    add_common(*predict, opts);
    std::string predict_split = "dev";
    predict->add_option("--split", predict_split, "split to label")->capture_default_str();

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a predictions CSV against gold labels");
    add_common(*evaluate, opts);
    std::string eval_split = "dev";
    std::string eval_predictions;
    std::string eval_scores;
    evaluate->add_option("--split", eval_split, "split holding the gold labels")->capture_default_str();
    evaluate->add_option("--predictions", eval_predictions, "predictions CSV")->required();
    evaluate->add_option("--scores", eval_scores, "scores CSV, enables the Q/S distribution table");

    auto* sweep = app.add_subcommand("sweep", "grid-search the replacement threshold");
    add_common(*sweep, opts);
    std::string grid_spec;
    std::vector<std::string> sweep_splits;
    sweep->add_option("--grid", grid_spec, "comma list or start:stop:step")->required();
    sweep->add_option("--split", sweep_splits, "splits to optimize on (default: configured train and dev)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto config = resolve(opts);
        if (prepare->parsed()) {
            auto splits = prepare_splits.empty() ? configured_splits(config) : to_splits(prepare_splits);
            legalqa::pipeline::cmd_prepare(config, splits, std::cerr);
        } else if (train->parsed()) {
            legalqa::pipeline::cmd_train_embeddings(config, std::cerr);
        } else if (predict->parsed()) {
            auto out = legalqa::pipeline::cmd_predict(config, legalqa::corpus::parse_split(predict_split), std::cerr);
            std::cout << out.predictions_file.string() << "\n";
        } else if (evaluate->parsed()) {
            std::optional<std::filesystem::path> scores;
            if (!eval_scores.empty()) scores = eval_scores;
            auto out = legalqa::pipeline::cmd_evaluate(config, legalqa::corpus::parse_split(eval_split),
                                                       eval_predictions, scores, std::cout);
            (void)out;
        } else if (sweep->parsed()) {
            const auto grid = legalqa::pipeline::parse_grid(grid_spec);
            std::vector<legalqa::corpus::Split> splits;
            if (sweep_splits.empty()) {
                for (auto split : {legalqa::corpus::Split::train, legalqa::corpus::Split::dev}) {
                    if (config.paths.split_path(split)) splits.push_back(split);
                }
            } else {
                splits = to_splits(sweep_splits);
            }
            legalqa::pipeline::cmd_sweep(config, splits, grid, std::cout);
        }
    } catch (const legalqa::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const legalqa::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
