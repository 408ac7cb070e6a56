// simpleaug: turn the implicit knowledge in a VQA training set (its own
// questions, instance annotations, detector outputs) into explicit
// image-question-answer triplets.
//
// Exit codes: 0 success, 1 fatal input error, 2 configuration error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simpleaug/pipeline.hpp"

namespace {

using namespace simpleaug;

struct CliOptions {
    RunConfig config;
    std::string rules = "yesno,color,number,what,paraphrase";
    std::string rare_gate = "both";
    std::string curriculum = "o-then-a-then-o";
    std::string predictions;
    std::string wordlist;
    std::string stoplist;
    double min_score = 0.0;
    int max_count = 0;  // 0 = unlimited
    bool no_verify = false;
};

void apply_options(CliOptions& opts) {
    RunConfig& config = opts.config;
    config.propagation.rules_enabled.clear();
    config.paraphrase_enabled = false;
    std::string current;
    std::vector<std::string> rules;
    for (char c : opts.rules) {
        if (c == ',') {
            if (!current.empty()) rules.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) rules.push_back(current);
    for (const auto& rule : rules) {
        if (rule == "yesno") config.propagation.rules_enabled.insert(QuestionCategory::yesno);
        else if (rule == "color") config.propagation.rules_enabled.insert(QuestionCategory::color);
        else if (rule == "number") config.propagation.rules_enabled.insert(QuestionCategory::number);
        else if (rule == "what") config.propagation.rules_enabled.insert(QuestionCategory::what);
        else if (rule == "paraphrase") config.paraphrase_enabled = true;
        else throw ConfigError("unknown rule \"" + rule + "\" in --rules");
    }
    config.propagation.min_score = opts.min_score;
    if (opts.max_count > 0) config.propagation.max_count = opts.max_count;
    config.verify = !opts.no_verify;
    if (opts.rare_gate == "one") {
        config.paraphrase.gate_both_directions = false;
    } else if (opts.rare_gate == "both") {
        config.paraphrase.gate_both_directions = true;
    } else {
        throw ConfigError("--rare-gate must be one|both");
    }
    auto strategy = curriculum_from_string(opts.curriculum);
    if (!strategy) throw ConfigError("--curriculum must be a+o|o-then-ao|o-then-a-then-o");
    config.curriculum = *strategy;
    if (!opts.predictions.empty()) config.predictions = opts.predictions;
    if (!opts.wordlist.empty()) config.wordlist = opts.wordlist;
    if (!opts.stoplist.empty()) config.stoplist = opts.stoplist;
}

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--rules", opts.rules,
                    "comma list of yesno,color,number,what,paraphrase")
        ->capture_default_str();
    cmd->add_flag("--no-verify", opts.no_verify, "disable both verification strategies");
    cmd->add_option("--min-score", opts.min_score, "detector score floor")
        ->capture_default_str();
    cmd->add_option("--max-count", opts.max_count, "drop number answers above this (0 = off)");
    cmd->add_option("--max-detections", opts.config.max_detections,
                    "objects kept per image")
        ->capture_default_str();
    cmd->add_option("--threshold", opts.config.paraphrase.threshold,
                    "paraphrase cosine threshold")
        ->capture_default_str();
    cmd->add_option("--topk", opts.config.paraphrase.top_k, "similar questions per question")
        ->capture_default_str();
    cmd->add_option("--rare-max", opts.config.paraphrase.rare_max,
                    "rare-answer ceiling for paraphrase swaps")
        ->capture_default_str();
    cmd->add_option("--rare-gate", opts.rare_gate, "gate one|both swap directions")
        ->capture_default_str();
    cmd->add_option("--wordlist", opts.wordlist, "extra noun tokens, one per line");
    cmd->add_option("--stoplist", opts.stoplist, "stoplist override, one token per line");
    cmd->add_option("--jobs", opts.config.jobs, "worker threads")->capture_default_str();
}

int cmd_run(CliOptions& opts) {
    apply_options(opts);
    RunResult result = run(opts.config);
    write_run_outputs(opts.config, result);
    std::cout << render_stats_table(result.stats);
    std::cerr << "simpleaug: " << result.augmented.size() << " augmented triplets -> "
              << opts.config.out_dir.string() << "\n";
    return 0;
}

int cmd_propagate(CliOptions& opts, const std::string& out_file) {
    apply_options(opts);
    opts.config.paraphrase_enabled = false;
    RunResult result = run(opts.config);
    write_augmented_jsonl(out_file, result.augmented);
    std::cerr << "simpleaug: " << result.augmented.size() << " propagated triplets -> "
              << out_file << "\n";
    return 0;
}

int cmd_paraphrase(CliOptions& opts, const std::string& out_file) {
    apply_options(opts);
    RunConfig& config = opts.config;
    detail::check_input_exists(config.questions, "questions");
    detail::check_input_exists(config.annotations, "annotations");
    detail::check_input_exists(config.embeddings, "embeddings");
    auto [corpus, vqa_report] = load_vqa(config.questions, config.annotations);
    auto [embeddings, emb_report] = load_embeddings(config.embeddings);
    ParaphraseIndex index = build_paraphrase_index(corpus, embeddings, config.paraphrase);
    auto [swaps, report] = paraphrase_swap(corpus, index, config.jobs);
    auto [deduped, dedup_report] = dedup(std::move(swaps), corpus);
    assign_question_ids(deduped, corpus.max_question_id);
    write_augmented_jsonl(out_file, deduped);
    std::cerr << "simpleaug: " << deduped.size() << " paraphrase triplets -> " << out_file
              << "\n";
    return 0;
}

int cmd_filter(const std::string& augmented_path, const std::string& predictions_path,
               const std::string& out_file) {
    auto augmented = read_augmented_jsonl(augmented_path);
    auto predictions = load_predictions(predictions_path);
    auto [kept, report] = filter_miss_answered(augmented, predictions);
    write_augmented_jsonl(out_file, kept);
    std::cerr << "simpleaug: retained " << report.retained << ", removed " << report.removed;
    if (report.unknown_question_ids > 0)
        std::cerr << " (warning: " << report.unknown_question_ids
                  << " predictions reference unknown question ids)";
    std::cerr << "\n";
    return 0;
}

int cmd_stats(const CliOptions& opts, const std::string& augmented_path,
              const std::string& filtered_path, const std::string& json_out) {
    auto [corpus, report] = load_vqa(opts.config.questions, opts.config.annotations);
    std::vector<AugmentedTriplet> augmented, filtered;
    if (!augmented_path.empty()) augmented = read_augmented_jsonl(augmented_path);
    if (!filtered_path.empty()) filtered = read_augmented_jsonl(filtered_path);
    AugStats stats =
        compute_stats(corpus, augmented, filtered_path.empty() ? nullptr : &filtered);
    std::cout << render_stats_table(stats);
    if (!json_out.empty()) {
        std::ofstream out(json_out, std::ios::binary);
        out << to_json(stats).dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simpleaug: rule-based IQA triplet augmentation for VQA training sets"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string out_file, augmented_path, filtered_path, predictions_path, json_out;

    auto add_corpus_flags = [&](CLI::App* cmd) {
        cmd->add_option("--questions", opts.config.questions, "VQA questions JSON")->required();
        cmd->add_option("--annotations", opts.config.annotations, "VQA annotations JSON")
            ->required();
    };
    auto add_evidence_flags = [&](CLI::App* cmd) {
        cmd->add_option("--coco", opts.config.coco, "COCO instances JSON")->required();
        cmd->add_option("--detections", opts.config.detections, "detections JSON")->required();
    };

    CLI::App* run_cmd = app.add_subcommand("run", "full pipeline: propagate, paraphrase, emit");
    add_corpus_flags(run_cmd);
    add_evidence_flags(run_cmd);
    run_cmd->add_option("--embeddings", opts.config.embeddings, "word embedding table");
    run_cmd->add_option("--out", opts.config.out_dir, "output directory")->required();
    run_cmd->add_option("--predictions", opts.predictions,
                        "model predictions for miss-answered filtering");
    run_cmd->add_option("--curriculum", opts.curriculum, "a+o|o-then-ao|o-then-a-then-o")
        ->capture_default_str();
    add_common_flags(run_cmd, opts);

    CLI::App* prop_cmd = app.add_subcommand("propagate", "question propagation only");
    add_corpus_flags(prop_cmd);
    add_evidence_flags(prop_cmd);
    prop_cmd->add_option("--out-file", out_file, "augmented JSONL output")->required();
    add_common_flags(prop_cmd, opts);

    CLI::App* para_cmd = app.add_subcommand("paraphrase", "question paraphrasing only");
    add_corpus_flags(para_cmd);
    para_cmd->add_option("--embeddings", opts.config.embeddings, "word embedding table")
        ->required();
    para_cmd->add_option("--out-file", out_file, "augmented JSONL output")->required();
    add_common_flags(para_cmd, opts);

    CLI::App* filter_cmd = app.add_subcommand("filter", "drop examples a model already answers");
    filter_cmd->add_option("--augmented", augmented_path, "augmented JSONL")->required();
    filter_cmd->add_option("--predictions", predictions_path, "model predictions JSON")
        ->required();
    filter_cmd->add_option("--out-file", out_file, "filtered JSONL output")->required();

    CLI::App* stats_cmd = app.add_subcommand("stats", "per-answer-type sample counts");
    add_corpus_flags(stats_cmd);
    stats_cmd->add_option("--augmented", augmented_path, "augmented JSONL");
    stats_cmd->add_option("--filtered", filtered_path, "filtered JSONL");
    stats_cmd->add_option("--out-file", json_out, "machine-readable stats JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(opts);
        if (prop_cmd->parsed()) return cmd_propagate(opts, out_file);
        if (para_cmd->parsed()) return cmd_paraphrase(opts, out_file);
        if (filter_cmd->parsed()) return cmd_filter(augmented_path, predictions_path, out_file);
        if (stats_cmd->parsed()) return cmd_stats(opts, augmented_path, filtered_path, json_out);
    } catch (const simpleaug::ConfigError& e) {
        std::cerr << "simpleaug: config error: " << e.what() << "\n";
        return 2;
    } catch (const simpleaug::LoadError& e) {
        std::cerr << "simpleaug: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "simpleaug: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
