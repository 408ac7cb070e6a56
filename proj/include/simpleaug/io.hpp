#pragma once
// File formats owned by the pipeline: the augmented-triplet JSON-lines
// sidecar, VQA-schema question/annotation pairs (so any trainer consumes
// the output unchanged), the external predictions file, and input digests
// for the run manifest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simpleaug/ingest.hpp"
#include "simpleaug/types.hpp"

namespace simpleaug {

// ---------------------------------------------------------------------------
// Augmented-triplet JSON lines

inline nlohmann::json to_json(const AugmentedTriplet& t) {
    nlohmann::json j{
        {"question_id", t.base.question_id},
        {"image_id", t.base.image_id},
        {"question", t.base.question},
        {"answer", t.base.answer},
        {"answer_type", to_string(t.base.answer_type)},
        {"source", to_string(t.base.source)},
        {"rule", to_string(t.rule)},
        {"source_question_id", t.source_question_id},
        {"source_image_id", t.source_image_id},
        {"self_verified", t.self_verified},
    };
    if (t.cross_verified == CrossVerified::not_applicable) {
        j["cross_verified"] = nullptr;
    } else {
        j["cross_verified"] = t.cross_verified == CrossVerified::yes;
    }
    return j;
}

inline AugmentedTriplet augmented_from_json(const nlohmann::json& j) {
    AugmentedTriplet t;
    t.base.question_id = j.at("question_id").get<QuestionId>();
    t.base.image_id = j.at("image_id").get<ImageId>();
    t.base.question = j.at("question").get<std::string>();
    t.base.answer = j.at("answer").get<std::string>();
    t.base.answer_type = answer_type_from_string(j.at("answer_type").get<std::string>());
    std::string source = j.at("source").get<std::string>();
    t.base.source = source == "paraphrased" ? TripletSource::paraphrased
                                            : TripletSource::propagated;
    if (auto rule = rule_from_string(j.at("rule").get<std::string>())) t.rule = *rule;
    t.source_question_id = j.at("source_question_id").get<QuestionId>();
    t.source_image_id = j.at("source_image_id").get<ImageId>();
    t.self_verified = j.at("self_verified").get<bool>();
    const auto& cv = j.at("cross_verified");
    t.cross_verified = cv.is_null() ? CrossVerified::not_applicable
                                    : (cv.get<bool>() ? CrossVerified::yes : CrossVerified::no);
    return t;
}

inline void write_augmented_jsonl(const std::filesystem::path& path,
                                  const std::vector<AugmentedTriplet>& triplets) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write " + path.string());
    for (const auto& t : triplets) out << to_json(t).dump() << '\n';
}

inline std::vector<AugmentedTriplet> read_augmented_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::vector<AugmentedTriplet> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(augmented_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// VQA-schema emission (questions + annotations pair)

inline void write_vqa_pair(const std::filesystem::path& questions_path,
                           const std::filesystem::path& annotations_path,
                           const std::vector<IqaTriplet>& triplets) {
    nlohmann::json questions = nlohmann::json::array();
    nlohmann::json annotations = nlohmann::json::array();
    for (const IqaTriplet& t : triplets) {
        questions.push_back({{"image_id", t.image_id},
                             {"question", t.question},
                             {"question_id", t.question_id}});
        annotations.push_back({{"question_id", t.question_id},
                               {"image_id", t.image_id},
                               {"multiple_choice_answer", t.answer},
                               {"answer_type", std::string(to_string(t.answer_type))}});
    }
    std::ofstream qout(questions_path, std::ios::binary);
    if (!qout) throw LoadError("cannot write " + questions_path.string());
    qout << nlohmann::json{{"questions", questions}}.dump(2) << '\n';
    std::ofstream aout(annotations_path, std::ios::binary);
    if (!aout) throw LoadError("cannot write " + annotations_path.string());
    aout << nlohmann::json{{"annotations", annotations}}.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Predictions file: the standard VQA result format,
// [{"question_id": N, "answer": "..."}]. Answers are normalized on load.

inline std::map<QuestionId, std::string> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
    if (!root.is_array())
        throw LoadError(path.string() + ": expected an array of {question_id, answer}");
    std::map<QuestionId, std::string> out;
    for (const auto& rec : root) {
        QuestionId qid = rec.at("question_id").get<QuestionId>();
        auto answer = normalize_answer(rec.at("answer").get<std::string>());
        out[qid] = answer ? *answer : std::string();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Input digests (FNV-1a 64, hex) for the run manifest

inline std::string fnv1a64_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::uint64_t hash = 1469598103934665603ull;
    char buffer[1 << 16];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 1099511628211ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(hex);
}

}  // namespace simpleaug
