#pragma once
// Small on-disk fixture builders shared by the unit tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
  public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = fs::temp_directory_path() /
                ("simpleaug_test_" + std::to_string(rng()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path file(const std::string& name) const { return path_ / name; }

  private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

struct TripletSpec {
    std::int64_t question_id;
    std::int64_t image_id;
    std::string question;
    std::string answer;
    std::string answer_type = "other";
};

// Writes the question/annotation JSON pair; returns the two paths.
inline std::pair<fs::path, fs::path> write_vqa(
    const fs::path& dir, const std::vector<TripletSpec>& triplets,
    const std::string& stem = "vqa") {
    nlohmann::json questions = nlohmann::json::array();
    nlohmann::json annotations = nlohmann::json::array();
    for (const auto& t : triplets) {
        questions.push_back({{"question_id", t.question_id},
                             {"image_id", t.image_id},
                             {"question", t.question}});
        annotations.push_back({{"question_id", t.question_id},
                               {"image_id", t.image_id},
                               {"multiple_choice_answer", t.answer},
                               {"answer_type", t.answer_type}});
    }
    fs::path qpath = dir / (stem + "_questions.json");
    fs::path apath = dir / (stem + "_annotations.json");
    write_file(qpath, nlohmann::json{{"questions", questions}}.dump());
    write_file(apath, nlohmann::json{{"annotations", annotations}}.dump());
    return {qpath, apath};
}

struct CategorySpec {
    std::int64_t id;
    std::string name;
    std::string supercategory;
};

inline fs::path write_coco(const fs::path& dir,
                           const std::vector<CategorySpec>& categories,
                           const std::vector<std::pair<std::int64_t, std::int64_t>>& annotations,
                           const std::string& name = "instances.json") {
    nlohmann::json cats = nlohmann::json::array();
    for (const auto& c : categories)
        cats.push_back({{"id", c.id}, {"name", c.name}, {"supercategory", c.supercategory}});
    nlohmann::json anns = nlohmann::json::array();
    std::int64_t ann_id = 1;
    for (const auto& [image_id, category_id] : annotations)
        anns.push_back({{"id", ann_id++}, {"image_id", image_id}, {"category_id", category_id}});
    fs::path path = dir / name;
    write_file(path, nlohmann::json{{"categories", cats}, {"annotations", anns}}.dump());
    return path;
}

struct DetectionSpec {
    std::string name;
    std::vector<std::string> attributes;
    double score;
};

inline fs::path write_detections(
    const fs::path& dir,
    const std::vector<std::pair<std::int64_t, std::vector<DetectionSpec>>>& images,
    const std::string& name = "detections.json") {
    nlohmann::json root = nlohmann::json::array();
    for (const auto& [image_id, objects] : images) {
        nlohmann::json objs = nlohmann::json::array();
        for (const auto& o : objects)
            objs.push_back({{"name", o.name}, {"attributes", o.attributes}, {"score", o.score}});
        root.push_back({{"image_id", image_id}, {"objects", objs}});
    }
    fs::path path = dir / name;
    write_file(path, root.dump());
    return path;
}

inline fs::path write_embeddings(const fs::path& dir, const std::string& content,
                                 const std::string& name = "embeddings.txt") {
    fs::path path = dir / name;
    write_file(path, content);
    return path;
}

}  // namespace fixtures
