#pragma once
// End-to-end orchestration: load -> analyze -> self-verify -> propagate ->
// cross-verify -> paraphrase -> dedup -> (optional) miss-answered filter ->
// curriculum + stats + manifest. Every output is deterministic: indexes
// sort by ids and the parallel stages merge in input order.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simpleaug/analysis.hpp"
#include "simpleaug/ingest.hpp"
#include "simpleaug/io.hpp"
#include "simpleaug/paraphrase.hpp"
#include "simpleaug/propagate.hpp"
#include "simpleaug/types.hpp"
#include "simpleaug/verify.hpp"

namespace simpleaug {

// ---------------------------------------------------------------------------
// Configuration

// Training curricula over original (O) and augmented (A) triplets.
enum class CurriculumStrategy { a_plus_o, o_then_ao, o_then_a_then_o };

inline std::string_view to_string(CurriculumStrategy s) {
    switch (s) {
        case CurriculumStrategy::a_plus_o: return "a+o";
        case CurriculumStrategy::o_then_ao: return "o-then-ao";
        case CurriculumStrategy::o_then_a_then_o: return "o-then-a-then-o";
    }
    return "o-then-a-then-o";
}

inline std::optional<CurriculumStrategy> curriculum_from_string(std::string_view s) {
    if (s == "a+o") return CurriculumStrategy::a_plus_o;
    if (s == "o-then-ao") return CurriculumStrategy::o_then_ao;
    if (s == "o-then-a-then-o") return CurriculumStrategy::o_then_a_then_o;
    return std::nullopt;
}

struct RunConfig {
    std::filesystem::path questions;
    std::filesystem::path annotations;
    std::filesystem::path coco;
    std::filesystem::path detections;
    std::filesystem::path embeddings;  // may be empty when paraphrasing is off
    std::filesystem::path out_dir;

    PropagationConfig propagation;
    ParaphraseParams paraphrase;
    bool paraphrase_enabled = true;
    bool verify = true;
    std::size_t max_detections = 36;
    std::optional<std::filesystem::path> predictions;
    std::optional<std::filesystem::path> wordlist;
    std::optional<std::filesystem::path> stoplist;
    CurriculumStrategy curriculum = CurriculumStrategy::o_then_a_then_o;
    unsigned jobs = 1;
};

// ---------------------------------------------------------------------------
// Dedup: one (image, normalized question) pair across O (and earlier A)

struct DedupReport {
    std::int64_t dropped_existing_question = 0;  // image already asks this
    std::int64_t dropped_duplicate_candidate = 0;
};

inline std::pair<std::vector<AugmentedTriplet>, DedupReport> dedup(
    std::vector<AugmentedTriplet> candidates, const TripletCorpus& corpus) {
    std::set<std::pair<ImageId, std::string>> seen;
    for (const IqaTriplet& t : corpus.triplets) seen.insert({t.image_id, t.question});

    DedupReport report;
    std::vector<AugmentedTriplet> kept;
    kept.reserve(candidates.size());
    std::set<std::pair<ImageId, std::string>> seen_candidates;
    for (auto& c : candidates) {
        std::pair<ImageId, std::string> key{c.base.image_id, c.base.question};
        if (seen.count(key)) {
            ++report.dropped_existing_question;
            continue;
        }
        if (!seen_candidates.insert(key).second) {
            ++report.dropped_duplicate_candidate;
            continue;
        }
        kept.push_back(std::move(c));
    }
    return {std::move(kept), report};
}

// Sequential ids starting at the power of ten above every original id.
inline void assign_question_ids(std::vector<AugmentedTriplet>& triplets,
                                QuestionId max_original_id) {
    QuestionId next = augmented_id_base(max_original_id);
    for (auto& t : triplets) t.base.question_id = next++;
}

// ---------------------------------------------------------------------------
// Miss-answered filtering via an external predictions file

struct FilterReport {
    std::int64_t retained = 0;
    std::int64_t removed = 0;
    std::int64_t unknown_question_ids = 0;  // predictions for ids not in the set
};

// Keeps the triplets the model failed on (prediction != answer) or never
// predicted; removes the ones it already answers.
inline std::pair<std::vector<AugmentedTriplet>, FilterReport> filter_miss_answered(
    const std::vector<AugmentedTriplet>& augmented,
    const std::map<QuestionId, std::string>& predictions) {
    FilterReport report;
    std::set<QuestionId> known;
    std::vector<AugmentedTriplet> kept;
    kept.reserve(augmented.size());
    for (const auto& t : augmented) {
        known.insert(t.base.question_id);
        auto it = predictions.find(t.base.question_id);
        if (it != predictions.end() && it->second == t.base.answer) {
            ++report.removed;
        } else {
            kept.push_back(t);
        }
    }
    report.retained = static_cast<std::int64_t>(kept.size());
    for (const auto& [qid, answer] : predictions)
        if (!known.count(qid)) ++report.unknown_question_ids;
    return {kept, report};
}

// ---------------------------------------------------------------------------
// Statistics (the per-answer-type sample counts)

struct TypeCounts {
    std::int64_t all = 0;
    std::int64_t yesno = 0;
    std::int64_t number = 0;
    std::int64_t other = 0;

    void add(AnswerType type) {
        ++all;
        switch (type) {
            case AnswerType::yesno: ++yesno; break;
            case AnswerType::number: ++number; break;
            case AnswerType::other: ++other; break;
        }
    }
};

struct AugStats {
    TypeCounts original;
    TypeCounts augmented;
    TypeCounts filtered;
    bool has_filtered = false;
};

inline AugStats compute_stats(const TripletCorpus& corpus,
                              const std::vector<AugmentedTriplet>& augmented,
                              const std::vector<AugmentedTriplet>* filtered = nullptr) {
    AugStats stats;
    for (const auto& t : corpus.triplets) stats.original.add(t.answer_type);
    for (const auto& t : augmented) stats.augmented.add(t.base.answer_type);
    if (filtered) {
        stats.has_filtered = true;
        for (const auto& t : *filtered) stats.filtered.add(t.base.answer_type);
    }
    return stats;
}

inline nlohmann::json to_json(const TypeCounts& c) {
    return {{"all", c.all}, {"yesno", c.yesno}, {"number", c.number}, {"other", c.other}};
}

inline nlohmann::json to_json(const AugStats& stats) {
    nlohmann::json j{{"original", to_json(stats.original)},
                     {"augmented", to_json(stats.augmented)}};
    if (stats.has_filtered) j["miss_answered"] = to_json(stats.filtered);
    return j;
}

inline std::string render_stats_table(const AugStats& stats) {
    std::ostringstream out;
    auto row = [&](const char* label, const TypeCounts& c) {
        out << label << '\t' << c.all << '\t' << c.yesno << '\t' << c.number << '\t' << c.other
            << '\n';
    };
    out << "# of samples\tAll\tY/N\tNum\tOther\n";
    row("original", stats.original);
    row("augmented", stats.augmented);
    if (stats.has_filtered) row("miss-answered", stats.filtered);
    return out.str();
}

// ---------------------------------------------------------------------------
// Curriculum emission

struct StageFiles {
    std::filesystem::path questions;
    std::filesystem::path annotations;
    std::size_t triplet_count = 0;
};

namespace detail {

inline std::vector<IqaTriplet> sorted_by_id(std::vector<IqaTriplet> triplets) {
    std::sort(triplets.begin(), triplets.end(),
              [](const IqaTriplet& a, const IqaTriplet& b) { return a.question_id < b.question_id; });
    return triplets;
}

}  // namespace detail

// Writes one VQA-schema file pair per training stage under
// out_dir/curriculum; any trainer consumes them unchanged.
inline std::vector<StageFiles> emit_curriculum(const std::filesystem::path& out_dir,
                                               const TripletCorpus& corpus,
                                               const std::vector<AugmentedTriplet>& augmented,
                                               CurriculumStrategy strategy) {
    std::filesystem::path dir = out_dir / "curriculum";
    std::filesystem::create_directories(dir);

    std::vector<IqaTriplet> original = corpus.triplets;
    std::vector<IqaTriplet> aug;
    aug.reserve(augmented.size());
    for (const auto& t : augmented) aug.push_back(t.base);
    std::vector<IqaTriplet> both = original;
    both.insert(both.end(), aug.begin(), aug.end());

    std::vector<std::vector<IqaTriplet>> stages;
    switch (strategy) {
        case CurriculumStrategy::a_plus_o:
            stages.push_back(detail::sorted_by_id(std::move(both)));
            break;
        case CurriculumStrategy::o_then_ao:
            stages.push_back(detail::sorted_by_id(original));
            stages.push_back(detail::sorted_by_id(std::move(both)));
            break;
        case CurriculumStrategy::o_then_a_then_o:
            stages.push_back(detail::sorted_by_id(original));
            stages.push_back(detail::sorted_by_id(std::move(aug)));
            stages.push_back(detail::sorted_by_id(original));
            break;
    }

    std::vector<StageFiles> files;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        StageFiles stage;
        std::string prefix = "stage" + std::to_string(i + 1);
        stage.questions = dir / (prefix + "_questions.json");
        stage.annotations = dir / (prefix + "_annotations.json");
        stage.triplet_count = stages[i].size();
        write_vqa_pair(stage.questions, stage.annotations, stages[i]);
        files.push_back(std::move(stage));
    }
    return files;
}

// ---------------------------------------------------------------------------
// run(): the whole pipeline

struct RunResult {
    TripletCorpus corpus;
    std::vector<AugmentedTriplet> augmented;        // final deduped set
    std::vector<AugmentedTriplet> filtered;         // after miss-answered filter
    bool has_filtered = false;
    AugStats stats;

    VqaLoadReport vqa_report;
    CocoLoadReport coco_report;
    DetectionLoadReport detection_report;
    EmbeddingLoadReport embedding_report;
    VerificationReport self_verify_report;
    VerificationReport cross_verify_report;
    PropagationReport propagation_report;
    ParaphraseReport paraphrase_report;
    DedupReport dedup_report;
    FilterReport filter_report;

    std::int64_t unique_questions = 0;
    std::int64_t triplets_without_evidence = 0;
};

namespace detail {

inline void check_input_exists(const std::filesystem::path& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string(what) + " path not set");
    if (!std::filesystem::exists(path))
        throw ConfigError(std::string(what) + " file does not exist: " + path.string());
}

inline nlohmann::json manifest_config(const RunConfig& config) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& category : config.propagation.rules_enabled)
        rules.push_back(std::string(to_string(category)));
    nlohmann::json j{
        {"rules", rules},
        {"paraphrase_enabled", config.paraphrase_enabled},
        {"verify", config.verify},
        {"min_score", config.propagation.min_score},
        {"max_detections", config.max_detections},
        {"threshold", config.paraphrase.threshold},
        {"top_k", config.paraphrase.top_k},
        {"rare_max", config.paraphrase.rare_max},
        {"rare_gate", config.paraphrase.gate_both_directions ? "both" : "one"},
        {"curriculum", std::string(to_string(config.curriculum))},
    };
    if (config.propagation.max_count) j["max_count"] = *config.propagation.max_count;
    return j;
}

}  // namespace detail

inline RunResult run(const RunConfig& config) {
    // Up-front existence checks; a bad path is a config error, not a load
    // error.
    detail::check_input_exists(config.questions, "questions");
    detail::check_input_exists(config.annotations, "annotations");
    detail::check_input_exists(config.coco, "coco instances");
    detail::check_input_exists(config.detections, "detections");
    if (config.paraphrase_enabled) detail::check_input_exists(config.embeddings, "embeddings");
    if (config.predictions) detail::check_input_exists(*config.predictions, "predictions");
    if (config.wordlist) detail::check_input_exists(*config.wordlist, "wordlist");
    if (config.stoplist) detail::check_input_exists(*config.stoplist, "stoplist");

    RunResult result;

    // Load the three knowledge sources.
    auto [corpus, vqa_report] = load_vqa(config.questions, config.annotations);
    result.corpus = std::move(corpus);
    result.vqa_report = vqa_report;
    CocoInstances coco = load_coco_instances(config.coco);
    result.coco_report = coco.report;
    auto [detections, det_report] = load_detections(config.detections, config.max_detections);
    result.detection_report = det_report;

    EmbeddingTable embeddings;
    if (config.paraphrase_enabled) {
        auto [table, emb_report] = load_embeddings(config.embeddings);
        embeddings = std::move(table);
        result.embedding_report = emb_report;
    }

    // Lexicon: hierarchy + detector vocabulary + optional wordlist.
    NounLexicon lex = NounLexicon::make(config.stoplist
                                            ? [&] {
                                                  auto words = load_wordlist(*config.stoplist);
                                                  return std::set<std::string>(words.begin(),
                                                                               words.end());
                                              }()
                                            : NounLexicon::default_stoplist());
    lex.add_hierarchy(coco.hierarchy);
    lex.add_detector_vocabulary(detections);
    if (config.wordlist)
        for (const auto& word : load_wordlist(*config.wordlist)) lex.add_name(word);
    lex.finalize();

    EvidenceMap evidence = merge_evidence(coco, detections);
    for (const auto& t : result.corpus.triplets)
        if (!evidence.count(t.image_id)) ++result.triplets_without_evidence;

    // Analyze unique questions.
    ClassifierConfig ccfg;
    std::vector<AnalyzedQuestion> analyzed = analyze_questions(result.corpus, lex, ccfg);
    result.unique_questions = static_cast<std::int64_t>(analyzed.size());
    AnalysisLookup lookup(analyzed);

    // Self-verification gates whole questions.
    std::vector<AnalyzedQuestion> propagation_input;
    if (config.verify) {
        auto [kept, report] = filter_self_verified(analyzed, result.corpus, evidence,
                                                   coco.hierarchy, config.propagation, lex,
                                                   config.jobs);
        propagation_input = std::move(kept);
        result.self_verify_report = std::move(report);
    } else {
        propagation_input = analyzed;
    }

    // Propagation over every eligible (question, image) pair.
    EvidenceIndex index = build_evidence_index(evidence, lex);
    auto [candidates, prop_report] =
        propagate_all(propagation_input, evidence, index, coco.hierarchy, result.corpus,
                      config.propagation, lex, config.jobs);
    result.propagation_report = prop_report;

    // Cross-verification against annotated triplets on the target images.
    if (config.verify) {
        for (auto& c : candidates) c.self_verified = true;
        auto [kept, report] = filter_cross_verified(std::move(candidates), result.corpus, lookup,
                                                    lex, ccfg, config.jobs);
        candidates = std::move(kept);
        result.cross_verify_report = std::move(report);
    }

    // Paraphrasing bypasses verification.
    if (config.paraphrase_enabled) {
        ParaphraseIndex pindex =
            build_paraphrase_index(result.corpus, embeddings, config.paraphrase);
        auto [swaps, report] = paraphrase_swap(result.corpus, pindex, config.jobs);
        result.paraphrase_report = report;
        candidates.insert(candidates.end(), std::make_move_iterator(swaps.begin()),
                          std::make_move_iterator(swaps.end()));
    }

    // Dedup + id assignment.
    auto [deduped, dedup_report] = dedup(std::move(candidates), result.corpus);
    result.dedup_report = dedup_report;
    assign_question_ids(deduped, result.corpus.max_question_id);
    result.augmented = std::move(deduped);

    // Miss-answered filtering through an external model's predictions.
    if (config.predictions) {
        auto predictions = load_predictions(*config.predictions);
        auto [kept, report] = filter_miss_answered(result.augmented, predictions);
        result.filtered = std::move(kept);
        result.filter_report = report;
        result.has_filtered = true;
    }

    result.stats = compute_stats(result.corpus, result.augmented,
                                 result.has_filtered ? &result.filtered : nullptr);
    return result;
}

// Writes every output file of a full run into config.out_dir.
inline void write_run_outputs(const RunConfig& config, const RunResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);

    write_augmented_jsonl(config.out_dir / "augmented.jsonl", result.augmented);
    if (result.has_filtered)
        write_augmented_jsonl(config.out_dir / "filtered.jsonl", result.filtered);

    const std::vector<AugmentedTriplet>& final_set =
        result.has_filtered ? result.filtered : result.augmented;
    emit_curriculum(config.out_dir, result.corpus, final_set, config.curriculum);

    {
        std::ofstream out(config.out_dir / "stats.json", std::ios::binary);
        out << to_json(result.stats).dump(2) << '\n';
    }

    nlohmann::json manifest;
    manifest["config"] = detail::manifest_config(config);
    manifest["inputs"] = nlohmann::json::object();
    auto add_input = [&](const char* name, const fs::path& path) {
        if (path.empty()) return;
        manifest["inputs"][name] = {{"path", path.string()}, {"fnv1a64", fnv1a64_hex(path)}};
    };
    add_input("questions", config.questions);
    add_input("annotations", config.annotations);
    add_input("coco", config.coco);
    add_input("detections", config.detections);
    if (config.paraphrase_enabled) add_input("embeddings", config.embeddings);
    if (config.predictions) add_input("predictions", *config.predictions);

    nlohmann::json stages;
    stages["load"] = {
        {"triplets", result.corpus.triplets.size()},
        {"questions_loaded", result.vqa_report.questions_loaded},
        {"annotations_loaded", result.vqa_report.annotations_loaded},
        {"skipped_unmatched", result.vqa_report.skipped_unmatched},
        {"dropped_empty_answer", result.vqa_report.dropped_empty_answer},
        {"dropped_empty_question", result.vqa_report.dropped_empty_question},
        {"coco_instances", result.coco_report.instances},
        {"detection_images", result.detection_report.images},
        {"detection_objects_kept", result.detection_report.objects_kept},
        {"detection_objects_skipped", result.detection_report.objects_skipped},
        {"embedding_tokens", result.embedding_report.tokens},
        {"triplets_without_evidence", result.triplets_without_evidence},
    };
    stages["analysis"] = {{"unique_questions", result.unique_questions}};
    stages["self_verify"] = {
        {"questions_dropped", result.self_verify_report.questions_dropped_by_self_verify},
        {"dropped_by_category", result.self_verify_report.self_dropped_by_category},
    };
    stages["propagation"] = {
        {"candidates", result.propagation_report.total_candidates()},
        {"by_rule", result.propagation_report.candidates_by_rule},
    };
    stages["cross_verify"] = {
        {"candidates_dropped", result.cross_verify_report.candidates_dropped_by_cross_verify},
        {"dropped_by_rule", result.cross_verify_report.cross_dropped_by_rule},
    };
    stages["paraphrase"] = {
        {"questions_indexed", result.paraphrase_report.questions_indexed},
        {"questions_excluded", result.paraphrase_report.questions_excluded},
        {"emitted", result.paraphrase_report.emitted},
        {"suppressed_by_rarity", result.paraphrase_report.suppressed_by_rarity},
    };
    stages["dedup"] = {
        {"dropped_existing_question", result.dedup_report.dropped_existing_question},
        {"dropped_duplicate_candidate", result.dedup_report.dropped_duplicate_candidate},
    };
    if (result.has_filtered) {
        stages["filter"] = {
            {"retained", result.filter_report.retained},
            {"removed", result.filter_report.removed},
            {"unknown_question_ids", result.filter_report.unknown_question_ids},
        };
    }
    stages["output"] = {{"augmented_total", result.augmented.size()}};
    manifest["stages"] = stages;
    manifest["stats"] = to_json(result.stats);

    std::ofstream out(config.out_dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
}

}  // namespace simpleaug
