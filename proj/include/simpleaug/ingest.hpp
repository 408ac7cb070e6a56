#pragma once
// Loaders for the three implicit-knowledge sources (original triplets,
// instance annotations, detector outputs) plus the word-embedding table.
// Everything is loaded into immutable, deterministically-ordered indexes;
// workers only ever read them.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simpleaug/text.hpp"
#include "simpleaug/types.hpp"

namespace simpleaug {

// ---------------------------------------------------------------------------
// Domain types

struct DetectedObject {
    std::string name;                 // lowercase
    std::set<std::string> attributes; // lowercase
    double score = 0.0;

    bool operator==(const DetectedObject&) const = default;
};

struct ImageEvidence {
    ImageId image_id = 0;
    std::map<std::string, int> annotated_instances;  // category name -> count
    std::vector<DetectedObject> detected_objects;    // at most max_detections

    bool operator==(const ImageEvidence&) const = default;
};

using EvidenceMap = std::map<ImageId, ImageEvidence>;

struct CategoryHierarchy {
    std::map<std::string, std::string> supercategory_of;        // category -> super
    std::map<std::string, std::set<std::string>> members_of;    // super -> categories

    bool operator==(const CategoryHierarchy&) const = default;

    bool is_category(const std::string& name) const { return supercategory_of.count(name) > 0; }
    bool is_supercategory(const std::string& name) const { return members_of.count(name) > 0; }
};

struct EmbeddingTable {
    std::size_t dimension = 0;
    std::map<std::string, std::vector<float>> vectors;

    bool operator==(const EmbeddingTable&) const = default;

    const std::vector<float>* find(const std::string& token) const {
        auto it = vectors.find(token);
        return it == vectors.end() ? nullptr : &it->second;
    }
};

// Original triplets plus every index the pipeline queries.
struct TripletCorpus {
    std::vector<IqaTriplet> triplets;  // sorted by question_id

    std::map<ImageId, std::vector<std::size_t>> by_image;        // -> triplet indexes
    std::map<std::string, std::vector<std::size_t>> by_question; // normalized q -> indexes
    // (normalized question, normalized answer) -> occurrences. Feeds the
    // rare-answer gate in the paraphrase stage.
    std::map<std::pair<std::string, std::string>, int> answer_pair_counts;
    QuestionId max_question_id = 0;

    bool operator==(const TripletCorpus&) const = default;

    int answer_pair_count(const std::string& question, const std::string& answer) const {
        auto it = answer_pair_counts.find({question, answer});
        return it == answer_pair_counts.end() ? 0 : it->second;
    }
};

// ---------------------------------------------------------------------------
// Per-loader reports (skip/duplicate counters surfaced in the run manifest)

struct VqaLoadReport {
    std::int64_t questions_loaded = 0;
    std::int64_t annotations_loaded = 0;
    std::int64_t skipped_unmatched = 0;       // qid present on only one side
    std::int64_t dropped_empty_answer = 0;
    std::int64_t dropped_empty_question = 0;
};

struct CocoLoadReport {
    std::int64_t categories = 0;
    std::int64_t instances = 0;
    std::int64_t images_with_instances = 0;
};

struct DetectionLoadReport {
    std::int64_t images = 0;
    std::int64_t objects_kept = 0;
    std::int64_t objects_skipped = 0;         // missing name or negative score
    std::int64_t objects_dropped_by_cap = 0;
};

struct EmbeddingLoadReport {
    std::int64_t tokens = 0;
    std::int64_t duplicates = 0;
};

struct CocoInstances {
    std::map<ImageId, std::map<std::string, int>> per_image;  // name -> count
    CategoryHierarchy hierarchy;
    CocoLoadReport report;
};

// ---------------------------------------------------------------------------
// JSON helpers

namespace detail {

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte carries the offset of the failure.
        throw LoadError(path.string() + ": " + e.what());
    }
}

template <typename T>
T require_field(const nlohmann::json& obj, const char* key, const std::filesystem::path& path) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw LoadError(path.string() + ": missing field \"" + key + "\"");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(path.string() + ": field \"" + key + "\": " + e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// load_vqa: official VQA v2 question/annotation pair -> TripletCorpus

inline std::pair<TripletCorpus, VqaLoadReport> load_vqa(
    const std::filesystem::path& questions_path,
    const std::filesystem::path& annotations_path) {
    nlohmann::json qroot = detail::parse_json_file(questions_path);
    nlohmann::json aroot = detail::parse_json_file(annotations_path);
    if (!qroot.is_object() || !qroot.contains("questions") || !qroot["questions"].is_array())
        throw LoadError(questions_path.string() + ": expected top-level \"questions\" array");
    if (!aroot.is_object() || !aroot.contains("annotations") || !aroot["annotations"].is_array())
        throw LoadError(annotations_path.string() + ": expected top-level \"annotations\" array");

    VqaLoadReport report;

    struct RawAnnotation {
        ImageId image_id;
        std::string answer;
        std::string answer_type;
    };
    std::map<QuestionId, RawAnnotation> annotations;
    for (const auto& a : aroot["annotations"]) {
        QuestionId qid = detail::require_field<QuestionId>(a, "question_id", annotations_path);
        annotations[qid] = RawAnnotation{
            detail::require_field<ImageId>(a, "image_id", annotations_path),
            detail::require_field<std::string>(a, "multiple_choice_answer", annotations_path),
            a.contains("answer_type") ? a["answer_type"].get<std::string>() : std::string("other"),
        };
        ++report.annotations_loaded;
    }

    TripletCorpus corpus;
    std::set<QuestionId> matched;
    for (const auto& q : qroot["questions"]) {
        QuestionId qid = detail::require_field<QuestionId>(q, "question_id", questions_path);
        ++report.questions_loaded;
        auto it = annotations.find(qid);
        if (it == annotations.end()) {
            ++report.skipped_unmatched;
            continue;
        }
        matched.insert(qid);
        auto question = normalize_question(
            detail::require_field<std::string>(q, "question", questions_path));
        if (!question) {
            ++report.dropped_empty_question;
            continue;
        }
        auto answer = normalize_answer(it->second.answer);
        if (!answer) {
            ++report.dropped_empty_answer;
            continue;
        }
        IqaTriplet t;
        t.question_id = qid;
        t.image_id = detail::require_field<ImageId>(q, "image_id", questions_path);
        t.question = std::move(*question);
        t.answer = std::move(*answer);
        t.answer_type = answer_type_from_string(it->second.answer_type);
        t.source = TripletSource::original;
        corpus.triplets.push_back(std::move(t));
    }
    report.skipped_unmatched +=
        static_cast<std::int64_t>(annotations.size() - matched.size());

    std::sort(corpus.triplets.begin(), corpus.triplets.end(),
              [](const IqaTriplet& a, const IqaTriplet& b) { return a.question_id < b.question_id; });
    for (std::size_t i = 0; i < corpus.triplets.size(); ++i) {
        const IqaTriplet& t = corpus.triplets[i];
        corpus.by_image[t.image_id].push_back(i);
        corpus.by_question[t.question].push_back(i);
        corpus.answer_pair_counts[{t.question, t.answer}] += 1;
        corpus.max_question_id = std::max(corpus.max_question_id, t.question_id);
    }
    return {std::move(corpus), report};
}

// ---------------------------------------------------------------------------
// load_coco_instances: COCO instances JSON -> per-image counts + hierarchy

inline CocoInstances load_coco_instances(const std::filesystem::path& path) {
    nlohmann::json root = detail::parse_json_file(path);
    if (!root.is_object() || !root.contains("categories") || !root.contains("annotations"))
        throw LoadError(path.string() + ": expected \"categories\" and \"annotations\"");

    CocoInstances out;
    std::map<std::int64_t, std::string> name_by_id;
    for (const auto& c : root["categories"]) {
        std::int64_t id = detail::require_field<std::int64_t>(c, "id", path);
        std::string name = to_lower_ascii(detail::require_field<std::string>(c, "name", path));
        std::string super = to_lower_ascii(detail::require_field<std::string>(c, "supercategory", path));
        name_by_id[id] = name;
        out.hierarchy.supercategory_of[name] = super;
        out.hierarchy.members_of[super].insert(name);
        ++out.report.categories;
    }
    if (name_by_id.empty()) throw LoadError(path.string() + ": no categories");

    for (const auto& a : root["annotations"]) {
        ImageId image_id = detail::require_field<ImageId>(a, "image_id", path);
        std::int64_t cat = detail::require_field<std::int64_t>(a, "category_id", path);
        auto it = name_by_id.find(cat);
        if (it == name_by_id.end())
            throw LoadError(path.string() + ": annotation references unknown category_id " +
                            std::to_string(cat));
        out.per_image[image_id][it->second] += 1;
        ++out.report.instances;
    }
    out.report.images_with_instances = static_cast<std::int64_t>(out.per_image.size());
    return out;
}

// ---------------------------------------------------------------------------
// load_detections: canonical detection JSON -> per-image object lists

inline std::pair<std::map<ImageId, std::vector<DetectedObject>>, DetectionLoadReport>
load_detections(const std::filesystem::path& path, std::size_t max_detections = 36) {
    nlohmann::json root = detail::parse_json_file(path);
    if (!root.is_array())
        throw LoadError(path.string() + ": expected a top-level array of per-image records");

    std::map<ImageId, std::vector<DetectedObject>> raw;
    DetectionLoadReport report;
    for (const auto& rec : root) {
        ImageId image_id = detail::require_field<ImageId>(rec, "image_id", path);
        if (!rec.contains("objects") || !rec["objects"].is_array())
            throw LoadError(path.string() + ": record for image " + std::to_string(image_id) +
                            " has no \"objects\" array");
        auto& objects = raw[image_id];
        for (const auto& o : rec["objects"]) {
            DetectedObject d;
            if (o.contains("name") && o["name"].is_string())
                d.name = to_lower_ascii(o["name"].get<std::string>());
            d.score = o.contains("score") ? o["score"].get<double>() : 0.0;
            if (d.name.empty() || d.score < 0.0) {
                ++report.objects_skipped;
                continue;
            }
            if (o.contains("attributes")) {
                for (const auto& attr : o["attributes"])
                    d.attributes.insert(to_lower_ascii(attr.get<std::string>()));
            }
            objects.push_back(std::move(d));
        }
    }

    // Keep the max_detections highest-scoring objects per image. Stable sort:
    // a tie at the cut-off keeps the lower original index.
    for (auto& [image_id, objects] : raw) {
        if (objects.size() > max_detections) {
            std::vector<std::size_t> order(objects.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return objects[a].score > objects[b].score;
            });
            order.resize(max_detections);
            std::sort(order.begin(), order.end());
            std::vector<DetectedObject> kept;
            kept.reserve(max_detections);
            for (std::size_t idx : order) kept.push_back(std::move(objects[idx]));
            report.objects_dropped_by_cap +=
                static_cast<std::int64_t>(objects.size() - kept.size());
            objects = std::move(kept);
        }
        report.objects_kept += static_cast<std::int64_t>(objects.size());
    }
    report.images = static_cast<std::int64_t>(raw.size());
    return {std::move(raw), report};
}

// ---------------------------------------------------------------------------
// load_embeddings: "token v1 v2 ... vd" per line, constant d

inline std::pair<EmbeddingTable, EmbeddingLoadReport> load_embeddings(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());

    EmbeddingTable table;
    EmbeddingLoadReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string token;
        if (!(ss >> token)) continue;  // blank line
        std::vector<float> vec;
        double value;
        while (ss >> value) vec.push_back(static_cast<float>(value));
        if (!ss.eof())
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed vector component");
        if (vec.empty())
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": token without vector");
        if (table.dimension == 0) {
            table.dimension = vec.size();
        } else if (vec.size() != table.dimension) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) +
                            ": dimension " + std::to_string(vec.size()) + " != " +
                            std::to_string(table.dimension));
        }
        auto [it, inserted] = table.vectors.insert_or_assign(std::move(token), std::move(vec));
        (void)it;
        if (!inserted) ++report.duplicates;
    }
    if (table.vectors.empty())
        throw LoadError(path.string() + ": empty embedding table");
    report.tokens = static_cast<std::int64_t>(table.vectors.size());
    return {std::move(table), report};
}

// ---------------------------------------------------------------------------
// Evidence merge: one ImageEvidence per image seen by either source

inline EvidenceMap merge_evidence(const CocoInstances& coco,
                                  const std::map<ImageId, std::vector<DetectedObject>>& detections) {
    EvidenceMap evidence;
    for (const auto& [image_id, counts] : coco.per_image) {
        ImageEvidence& ev = evidence[image_id];
        ev.image_id = image_id;
        ev.annotated_instances = counts;
    }
    for (const auto& [image_id, objects] : detections) {
        ImageEvidence& ev = evidence[image_id];
        ev.image_id = image_id;
        ev.detected_objects = objects;
    }
    return evidence;
}

}  // namespace simpleaug
