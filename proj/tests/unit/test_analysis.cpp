#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "simpleaug/analysis.hpp"

using namespace simpleaug;

namespace {

NounLexicon test_lexicon() {
    NounLexicon lex = NounLexicon::make();
    for (const char* name : {"cat", "dog", "sheep", "horse", "person", "pillow", "bus",
                             "truck", "glass", "box", "bench", "skis", "animal"})
        lex.add_name(name);
    lex.finalize();
    return lex;
}

CategoryHierarchy coco_like_hierarchy() {
    CategoryHierarchy h;
    auto add = [&](const std::string& cat, const std::string& super) {
        h.supercategory_of[cat] = super;
        h.members_of[super].insert(cat);
    };
    for (const char* animal : {"bird", "cat", "dog", "horse", "sheep", "cow", "elephant",
                               "bear", "zebra", "giraffe"})
        add(animal, "animal");
    for (const char* vehicle : {"bicycle", "car", "bus", "truck"}) add(vehicle, "vehicle");
    add("person", "person");
    return h;
}

}  // namespace

TEST_CASE("classify_question categories") {
    CHECK(classify_question("is there a cat on the pillow") == QuestionCategory::yesno);
    CHECK(classify_question("how many animals are there") == QuestionCategory::number);
    CHECK(classify_question("what color is the truck") == QuestionCategory::color);
    CHECK(classify_question("what animal is this") == QuestionCategory::what);
    CHECK(classify_question("where is the dog") == QuestionCategory::unsupported);
    CHECK(classify_question("do you like it") == QuestionCategory::yesno);
    CHECK(classify_question("could this be real") == QuestionCategory::yesno);
}

TEST_CASE("classify_question precedence") {
    // number > color > what > yesno.
    CHECK(classify_question("how many colors are there") == QuestionCategory::number);
    CHECK(classify_question("what is the number of dogs") == QuestionCategory::number);
    CHECK(classify_question("is the number of cats even") == QuestionCategory::number);
    CHECK(classify_question("what colour is the truck") == QuestionCategory::color);
    CHECK(classify_question("is the truck a dark color") == QuestionCategory::color);
    CHECK(classify_question("what is the person doing") == QuestionCategory::what);
}

TEST_CASE("classify_question is total") {
    CHECK(classify_question("") == QuestionCategory::unsupported);
    CHECK(classify_question("number") == QuestionCategory::unsupported);
    CHECK(classify_question("xyzzy plugh") == QuestionCategory::unsupported);
}

TEST_CASE("singularize suffix rules") {
    NounLexicon lex = test_lexicon();
    CHECK(singularize("dogs", lex) == "dog");
    CHECK(singularize("people", lex) == "person");
    CHECK(singularize("glass", lex) == "glass");
    CHECK(singularize("glasses", lex) == "glass");
    CHECK(singularize("buses", lex) == "bus");
    CHECK(singularize("boxes", lex) == "box");
    CHECK(singularize("benches", lex) == "bench");
    CHECK(singularize("horses", lex) == "horse");
    CHECK(singularize("puppies", lex) == "puppy");
    CHECK(singularize("sheep", lex) == "sheep");
    CHECK(singularize("skis", lex) == "skis");  // vocabulary name stays canonical
    CHECK(singularize("dog", lex) == "dog");
}

TEST_CASE("singularize is idempotent") {
    NounLexicon lex = test_lexicon();
    // Every lexicon noun round-trips through its plural.
    for (const auto& noun : lex.nouns) {
        CHECK(singularize(pluralize(noun), lex) == noun);
        CHECK(singularize(noun, lex) == singularize(singularize(noun, lex), lex));
    }
    // Random tokens, including ugly suffix pileups.
    std::mt19937 rng(42);
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz";
    std::uniform_int_distribution<size_t> len(1, 10);
    std::uniform_int_distribution<size_t> pick(0, sizeof(alphabet) - 2);
    std::uniform_int_distribution<int> suffix(0, 4);
    for (int i = 0; i < 5000; ++i) {
        std::string t;
        size_t n = len(rng);
        for (size_t j = 0; j < n; ++j) t.push_back(alphabet[pick(rng)]);
        switch (suffix(rng)) {
            case 0: t += "s"; break;
            case 1: t += "es"; break;
            case 2: t += "ies"; break;
            case 3: t += "ss"; break;
            default: break;
        }
        std::string once = singularize(t, lex);
        CHECK(singularize(once, lex) == once);
    }
    // Irregular plurals of irregular plurals stay fixed.
    CHECK(singularize("mens", lex) == singularize(singularize("mens", lex), lex));
}

TEST_CASE("extract_nouns on worked questions") {
    NounLexicon lex = test_lexicon();
    auto yesno = extract_nouns("is there a cat on the pillow", QuestionCategory::yesno, lex);
    CHECK(yesno.nouns == std::vector<std::string>{"cat", "pillow"});

    auto what = extract_nouns("what is the person doing in the picture", QuestionCategory::what, lex);
    CHECK(what.nouns == std::vector<std::string>{"person"});

    auto number = extract_nouns("how many dogs", QuestionCategory::number, lex);
    REQUIRE(number.nouns == std::vector<std::string>{"dog"});
    CHECK(number.surface_forms.at("dog").count("dog") == 1);
    CHECK(number.surface_forms.at("dog").count("dogs") == 1);
}

TEST_CASE("extract_nouns respects stoplist and category keywords") {
    NounLexicon lex = test_lexicon();
    auto empty = extract_nouns("is this a nice photograph", QuestionCategory::yesno, lex);
    CHECK(empty.nouns.empty());
    auto color = extract_nouns("what color is the truck", QuestionCategory::color, lex);
    CHECK(color.nouns == std::vector<std::string>{"truck"});
    for (const auto& noun : color.nouns) CHECK(lex.stoplist.count(noun) == 0);
    // "pictures" singularizes into the stoplist and is still excluded.
    auto plural_stop = extract_nouns("how many pictures", QuestionCategory::number, lex);
    CHECK(plural_stop.nouns.empty());
}

TEST_CASE("extract_nouns keeps supercategory names") {
    NounLexicon lex = test_lexicon();
    auto res = extract_nouns("what animal is this", QuestionCategory::what, lex);
    CHECK(res.nouns == std::vector<std::string>{"animal"});
    auto count = extract_nouns("how many animals are there", QuestionCategory::number, lex);
    CHECK(count.nouns == std::vector<std::string>{"animal"});
}

TEST_CASE("expand_supercategory") {
    CategoryHierarchy h = coco_like_hierarchy();
    // Read off the hierarchy fixture: the ten COCO animal categories.
    CHECK(expand_supercategory("animal", h) ==
          std::vector<std::string>{"bear", "bird", "cat", "cow", "dog", "elephant", "giraffe",
                                   "horse", "sheep", "zebra"});
    CHECK(expand_supercategory("dog", h) == std::vector<std::string>{"dog"});
    CHECK(expand_supercategory("unicorn", h) == std::vector<std::string>{"unicorn"});
}

TEST_CASE("analyze_questions groups unique questions") {
    fixtures::TempDir dir;
    auto [qpath, apath] = fixtures::write_vqa(dir.path(), {
        {1, 10, "How many dogs?", "2", "number"},
        {2, 11, "How many dogs?", "3", "number"},
        {3, 11, "How many dogs ?", "3", "number"},   // same normalized text
        {4, 12, "Is there a cat on the pillow?", "yes", "yes/no"},
        {5, 13, "What color is the cat and the dog?", "black", "other"},
    });
    auto [corpus, report] = load_vqa(qpath, apath);
    NounLexicon lex = test_lexicon();
    auto analyzed = analyze_questions(corpus, lex);

    REQUIRE(analyzed.size() == 3);
    CHECK(analyzed[0].question == "how many dogs");
    CHECK(analyzed[0].source_question_ids == std::vector<QuestionId>{1, 2, 3});
    CHECK(analyzed[0].source_image_ids == std::vector<ImageId>{10, 11});
    CHECK(analyzed[0].propagatable);

    CHECK(analyzed[1].question == "is there a cat on the pillow");
    CHECK(analyzed[1].propagatable);

    // Multi-noun color question: analyzed but not propagatable.
    CHECK(analyzed[2].category == QuestionCategory::color);
    CHECK(analyzed[2].nouns.size() == 2);
    CHECK_FALSE(analyzed[2].propagatable);

    // Grouping invariant: source id counts sum to the corpus size.
    std::size_t total = 0;
    for (const auto& aq : analyzed) total += aq.source_question_ids.size();
    CHECK(total == corpus.triplets.size());
}

TEST_CASE("vocabulary plurals alias their singular instead of becoming canonical") {
    // Detector vocabularies list "dogs" next to "dog"; the plural must not
    // hijack canonicalization or the counting rules go dark.
    NounLexicon lex = NounLexicon::make();
    lex.add_name("dog");
    lex.add_name("dogs");
    lex.add_name("skis");     // no singular "ski" known: stays canonical
    lex.add_name("glasses");  // no "glass" known: stays canonical
    lex.finalize();
    CHECK(lex.nouns.count("dog") == 1);
    CHECK(lex.nouns.count("dogs") == 0);
    CHECK(singularize("dogs", lex) == "dog");
    CHECK(lex.nouns.count("skis") == 1);
    CHECK(singularize("skis", lex) == "skis");
    CHECK(lex.nouns.count("glasses") == 1);

    NounLexicon with_glass = NounLexicon::make();
    with_glass.add_name("glass");
    with_glass.add_name("glasses");
    with_glass.finalize();
    CHECK(with_glass.nouns.count("glasses") == 0);
    CHECK(singularize("glasses", with_glass) == "glass");
}

TEST_CASE("label_matches_noun is exact match after singularization") {
    NounLexicon lex = test_lexicon();
    auto surfaces = surface_forms_of("dog", lex);
    CHECK(label_matches_noun("dog", "dog", surfaces, lex));
    CHECK(label_matches_noun("dogs", "dog", surfaces, lex));
    CHECK_FALSE(label_matches_noun("dogcart", "dog", surfaces, lex));
    CHECK_FALSE(label_matches_noun("hot dog", "dog", surfaces, lex));
    auto people = surface_forms_of("person", lex);
    CHECK(label_matches_noun("people", "person", people, lex));
}
