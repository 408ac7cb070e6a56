#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "simpleaug/propagate.hpp"

using namespace simpleaug;

namespace {

NounLexicon test_lexicon() {
    NounLexicon lex = NounLexicon::make();
    for (const char* name : {"cat", "dog", "sheep", "pillow", "bus", "truck", "animal", "horse"})
        lex.add_name(name);
    lex.finalize();
    return lex;
}

CategoryHierarchy animal_hierarchy() {
    CategoryHierarchy h;
    for (const char* animal : {"dog", "cat", "sheep", "horse"}) {
        h.supercategory_of[animal] = "animal";
        h.members_of["animal"].insert(animal);
    }
    h.supercategory_of["bus"] = "vehicle";
    h.members_of["vehicle"].insert("bus");
    return h;
}

AnalyzedQuestion make_question(const std::string& normalized, const NounLexicon& lex,
                               std::vector<QuestionId> qids = {1},
                               std::vector<ImageId> images = {1}) {
    AnalyzedQuestion aq;
    aq.question = normalized;
    aq.category = classify_question(normalized);
    ExtractedNouns extracted = extract_nouns(normalized, aq.category, lex);
    aq.nouns = extracted.nouns;
    aq.surface_forms = extracted.surface_forms;
    aq.source_question_ids = std::move(qids);
    aq.source_image_ids = std::move(images);
    aq.propagatable = noun_arity_supported(aq.category, aq.nouns.size());
    return aq;
}

ImageEvidence detections_only(ImageId id, std::vector<DetectedObject> objects) {
    ImageEvidence ev;
    ev.image_id = id;
    ev.detected_objects = std::move(objects);
    return ev;
}

ImageEvidence annotations_only(ImageId id, std::map<std::string, int> counts) {
    ImageEvidence ev;
    ev.image_id = id;
    ev.annotated_instances = std::move(counts);
    return ev;
}

}  // namespace

TEST_CASE("propagate_yesno coverage trichotomy") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    auto aq = make_question("is there a cat on the pillow", lex);
    REQUIRE(aq.nouns == std::vector<std::string>{"cat", "pillow"});

    auto pillow_only = detections_only(2, {{"pillow", {}, 0.9}});
    CHECK(propagate_yesno(aq, pillow_only, cfg, lex) == "no");

    auto both = detections_only(3, {{"cat", {}, 0.8}, {"pillow", {}, 0.9}});
    CHECK(propagate_yesno(aq, both, cfg, lex) == "yes");

    auto unrelated = detections_only(4, {{"dog", {}, 0.9}});
    CHECK_FALSE(propagate_yesno(aq, unrelated, cfg, lex).has_value());
}

TEST_CASE("propagate_yesno produces exactly one outcome per image") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    auto aq = make_question("is there a cat on the pillow", lex);
    std::mt19937 rng(11);
    std::bernoulli_distribution flip(0.5);
    for (int i = 0; i < 200; ++i) {
        std::vector<DetectedObject> objects;
        if (flip(rng)) objects.push_back({"cat", {}, 0.9});
        if (flip(rng)) objects.push_back({"pillow", {}, 0.9});
        if (flip(rng)) objects.push_back({"dog", {}, 0.9});
        auto ev = detections_only(1, objects);
        auto covered = detected_noun_coverage(aq, ev, cfg, lex);
        auto answer = propagate_yesno(aq, ev, cfg, lex);
        if (covered.empty()) {
            CHECK_FALSE(answer.has_value());
        } else if (covered.size() == aq.nouns.size()) {
            CHECK(answer == "yes");
        } else {
            CHECK(answer == "no");
        }
    }
}

TEST_CASE("propagate_yesno respects the detector score floor") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    cfg.min_score = 0.5;
    auto aq = make_question("is there a cat on the pillow", lex);
    auto weak_cat = detections_only(2, {{"cat", {}, 0.4}, {"pillow", {}, 0.9}});
    CHECK(propagate_yesno(aq, weak_cat, cfg, lex) == "no");
}

TEST_CASE("propagate_yesno matches plural detections") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    auto aq = make_question("is there a cat on the pillow", lex);
    auto plural = detections_only(2, {{"cats", {}, 0.9}, {"pillows", {}, 0.9}});
    CHECK(propagate_yesno(aq, plural, cfg, lex) == "yes");
}

TEST_CASE("propagate_color direct rule with a unique color") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    auto aq = make_question("what color is the cat", lex);
    auto ev = detections_only(2, {{"cat", {"black"}, 0.9}});
    auto candidates = propagate_color(aq, ev, cfg, lex);
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].question == "what color is the cat");
    CHECK(candidates[0].answer == "black");
    CHECK_FALSE(candidates[0].replaced);
}

TEST_CASE("propagate_color replacement rule substitutes the noun") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    auto aq = make_question("what color is the cat", lex);
    auto ev = detections_only(2, {{"cat", {"black"}, 0.9}, {"bus", {"yellow"}, 0.8}});
    auto candidates = propagate_color(aq, ev, cfg, lex);
    REQUIRE(candidates.size() == 2);
    CHECK(candidates[0].question == "what color is the cat");
    CHECK(candidates[0].answer == "black");
    CHECK(candidates[1].question == "what color is the bus");
    CHECK(candidates[1].answer == "yellow");
    CHECK(candidates[1].replaced);
}

TEST_CASE("propagate_color skips ambiguous names") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    auto aq = make_question("what color is the cat", lex);
    auto two_cats = detections_only(2, {{"cat", {"black"}, 0.9}, {"cat", {"white"}, 0.8}});
    CHECK(propagate_color(aq, two_cats, cfg, lex).empty());

    // An ambiguous replacement name is skipped while the direct one stands.
    auto mixed = detections_only(2, {{"cat", {"black"}, 0.9},
                                     {"bus", {"yellow"}, 0.8},
                                     {"bus", {"red"}, 0.7}});
    auto candidates = propagate_color(aq, mixed, cfg, lex);
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].answer == "black");
}

TEST_CASE("propagate_color requires the noun to be covered") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    auto aq = make_question("what color is the cat", lex);
    auto no_cat = detections_only(2, {{"bus", {"yellow"}, 0.9}});
    CHECK(propagate_color(aq, no_cat, cfg, lex).empty());
}

TEST_CASE("propagate_color only emits vocabulary colors") {
    NounLexicon lex = test_lexicon();
    PropagationConfig cfg;
    auto aq = make_question("what color is the cat", lex);
    auto ev = detections_only(2, {{"cat", {"wooden", "black"}, 0.9},
                                  {"bus", {"shiny"}, 0.8}});
    auto candidates = propagate_color(aq, ev, cfg, lex);
    REQUIRE(candidates.size() == 1);  // bus has no vocabulary color at all
    CHECK(cfg.color_vocabulary.count(candidates[0].answer) == 1);
}

TEST_CASE("propagate_number counts annotated instances") {
    NounLexicon lex = test_lexicon();
    CategoryHierarchy h = animal_hierarchy();
    PropagationConfig cfg;
    auto aq = make_question("how many dogs", lex);

    CHECK(propagate_number(aq, annotations_only(2, {{"dog", 3}}), h, cfg) == "3");
    CHECK_FALSE(propagate_number(aq, annotations_only(2, {{"cat", 2}}), h, cfg).has_value());

    auto animals = make_question("how many animals are there", lex);
    CHECK(propagate_number(animals, annotations_only(2, {{"dog", 2}, {"cat", 1}}), h, cfg) == "3");
}

TEST_CASE("propagate_number honors max_count") {
    NounLexicon lex = test_lexicon();
    CategoryHierarchy h = animal_hierarchy();
    PropagationConfig cfg;
    cfg.max_count = 10;
    auto aq = make_question("how many dogs", lex);
    CHECK(propagate_number(aq, annotations_only(2, {{"dog", 10}}), h, cfg) == "10");
    CHECK_FALSE(propagate_number(aq, annotations_only(2, {{"dog", 11}}), h, cfg).has_value());
}

TEST_CASE("propagate_number equals a brute-force recount") {
    NounLexicon lex = test_lexicon();
    CategoryHierarchy h = animal_hierarchy();
    PropagationConfig cfg;
    auto aq = make_question("how many animals are there", lex);
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> count(0, 4);
    for (int i = 0; i < 100; ++i) {
        std::map<std::string, int> instances;
        int expected = 0;
        for (const char* name : {"dog", "cat", "sheep", "horse", "bus"}) {
            int c = count(rng);
            if (c > 0) instances[name] = c;
            if (std::string(name) != "bus") expected += c;
        }
        auto answer = propagate_number(aq, annotations_only(1, instances), h, cfg);
        if (expected == 0) {
            CHECK_FALSE(answer.has_value());
        } else {
            CHECK(answer == std::to_string(expected));
        }
    }
}

TEST_CASE("propagate_what requires noun coverage and the answer label") {
    NounLexicon lex = test_lexicon();
    CategoryHierarchy h = animal_hierarchy();
    auto aq = make_question("what animal is this", lex);
    REQUIRE(aq.nouns == std::vector<std::string>{"animal"});

    CHECK(propagate_what("sheep", aq, annotations_only(2, {{"sheep", 1}}), h) == "sheep");
    CHECK_FALSE(propagate_what("sheep", aq, annotations_only(2, {{"dog", 1}}), h).has_value());
    // Multiple animals present: containment alone decides.
    CHECK(propagate_what("sheep", aq, annotations_only(2, {{"sheep", 2}, {"dog", 1}}), h) ==
          "sheep");
}

namespace {

// Shared fixture for propagate_all: one yes/no question annotated on image
// 1, three candidate images with full/partial/zero noun coverage.
struct AllFixture {
    NounLexicon lex = test_lexicon();
    CategoryHierarchy h = animal_hierarchy();
    PropagationConfig cfg;
    TripletCorpus corpus;
    EvidenceMap evidence;
    std::vector<AnalyzedQuestion> questions;

    AllFixture() {
        fixtures::TempDir dir;
        auto [qpath, apath] = fixtures::write_vqa(dir.path(), {
            {1, 1, "Is there a cat on the pillow?", "yes", "yes/no"},
        });
        corpus = load_vqa(qpath, apath).first;
        evidence[1] = detections_only(1, {{"cat", {}, 0.9}, {"pillow", {}, 0.9}});
        evidence[2] = detections_only(2, {{"cat", {}, 0.9}, {"pillow", {}, 0.8}});
        evidence[3] = detections_only(3, {{"pillow", {}, 0.8}});
        evidence[4] = detections_only(4, {{"dog", {}, 0.9}});
        questions = analyze_questions(corpus, lex);
    }
};

}  // namespace

TEST_CASE("propagate_all applies rules to eligible images only") {
    AllFixture f;
    EvidenceIndex index = build_evidence_index(f.evidence, f.lex);
    auto [candidates, report] =
        propagate_all(f.questions, f.evidence, index, f.h, f.corpus, f.cfg, f.lex);

    REQUIRE(candidates.size() == 2);
    CHECK(candidates[0].base.image_id == 2);
    CHECK(candidates[0].base.answer == "yes");
    CHECK(candidates[0].rule == Rule::yesno_yes);
    CHECK(candidates[1].base.image_id == 3);
    CHECK(candidates[1].base.answer == "no");
    CHECK(candidates[1].rule == Rule::yesno_no);
    // Image 1 is the question's own source image and is never targeted.
    for (const auto& c : candidates) CHECK(c.base.image_id != 1);
    CHECK(report.candidates_by_rule.at("yesno_yes") == 1);
    CHECK(report.candidates_by_rule.at("yesno_no") == 1);
}

TEST_CASE("propagate_all output does not depend on the worker count") {
    AllFixture f;
    EvidenceIndex index = build_evidence_index(f.evidence, f.lex);
    auto one = propagate_all(f.questions, f.evidence, index, f.h, f.corpus, f.cfg, f.lex, 1);
    auto eight = propagate_all(f.questions, f.evidence, index, f.h, f.corpus, f.cfg, f.lex, 8);
    CHECK(one.first == eight.first);
}

TEST_CASE("propagate_all processes a unique question once") {
    NounLexicon lex = test_lexicon();
    CategoryHierarchy h = animal_hierarchy();
    PropagationConfig cfg;
    fixtures::TempDir dir;
    std::vector<fixtures::TripletSpec> specs;
    for (int i = 1; i <= 5; ++i)
        specs.push_back({i, i, "How many dogs?", "2", "number"});
    auto [qpath, apath] = fixtures::write_vqa(dir.path(), specs);
    TripletCorpus corpus = load_vqa(qpath, apath).first;

    EvidenceMap evidence;
    for (ImageId id = 1; id <= 5; ++id) evidence[id] = annotations_only(id, {{"dog", 2}});
    evidence[10] = annotations_only(10, {{"dog", 4}});

    auto questions = analyze_questions(corpus, lex);
    REQUIRE(questions.size() == 1);
    EvidenceIndex index = build_evidence_index(evidence, lex);
    auto [candidates, report] = propagate_all(questions, evidence, index, h, corpus, cfg, lex);

    // One candidate for image 10, not five.
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].base.image_id == 10);
    CHECK(candidates[0].base.answer == "4");
    CHECK(candidates[0].source_question_id == 1);
}

TEST_CASE("propagate_all respects rule toggles") {
    AllFixture f;
    f.cfg.rules_enabled = {QuestionCategory::number};
    EvidenceIndex index = build_evidence_index(f.evidence, f.lex);
    auto [candidates, report] =
        propagate_all(f.questions, f.evidence, index, f.h, f.corpus, f.cfg, f.lex);
    CHECK(candidates.empty());
}

TEST_CASE("propagate_all emits multiple what answers for distinct sources") {
    NounLexicon lex = test_lexicon();
    CategoryHierarchy h = animal_hierarchy();
    PropagationConfig cfg;
    fixtures::TempDir dir;
    auto [qpath, apath] = fixtures::write_vqa(dir.path(), {
        {1, 1, "What animal is this?", "sheep", "other"},
        {2, 2, "What animal is this?", "dog", "other"},
    });
    TripletCorpus corpus = load_vqa(qpath, apath).first;
    EvidenceMap evidence;
    evidence[1] = annotations_only(1, {{"sheep", 1}});
    evidence[2] = annotations_only(2, {{"dog", 1}});
    evidence[3] = annotations_only(3, {{"sheep", 1}, {"dog", 2}});
    auto questions = analyze_questions(corpus, lex);
    EvidenceIndex index = build_evidence_index(evidence, lex);
    auto [candidates, report] = propagate_all(questions, evidence, index, h, corpus, cfg, lex);

    // Image 3 supports both source answers; images 1 and 2 are excluded as
    // source images of the same unique question.
    REQUIRE(candidates.size() == 2);
    CHECK(candidates[0].base.image_id == 3);
    CHECK(candidates[0].base.answer == "sheep");
    CHECK(candidates[0].source_question_id == 1);
    CHECK(candidates[1].base.image_id == 3);
    CHECK(candidates[1].base.answer == "dog");
    CHECK(candidates[1].source_question_id == 2);
}
