#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "simpleaug/text.hpp"
#include "simpleaug/types.hpp"

using namespace simpleaug;

TEST_CASE("normalize_answer basic forms") {
    CHECK(normalize_answer("Yellow ") == "yellow");
    CHECK(normalize_answer("a sheep") == "sheep");
    CHECK(normalize_answer("Two") == "2");
    CHECK(normalize_answer("  No.") == "no");
    CHECK(normalize_answer("the   hot  dog") == "hot dog");
    CHECK(normalize_answer("10") == "10");
}

TEST_CASE("normalize_answer number word table") {
    // Full table: the only word->digit rewrites the normalizer performs.
    const std::pair<const char*, const char*> table[] = {
        {"zero", "0"}, {"one", "1"}, {"two", "2"},   {"three", "3"},
        {"four", "4"}, {"five", "5"}, {"six", "6"},  {"seven", "7"},
        {"eight", "8"}, {"nine", "9"}, {"ten", "10"},
    };
    for (const auto& [word, digits] : table) {
        CHECK(normalize_answer(word) == digits);
    }
    CHECK(normalize_answer("eleven") == "eleven");
    CHECK(normalize_answer("twos") == "twos");
}

TEST_CASE("normalize_answer unusable answers") {
    CHECK_FALSE(normalize_answer("the").has_value());
    CHECK_FALSE(normalize_answer("a").has_value());
    CHECK_FALSE(normalize_answer("  ?!").has_value());
}

TEST_CASE("normalize_question basic forms") {
    CHECK(normalize_question("How many dogs?") == "how many dogs");
    CHECK(normalize_question("Is there a cat on the pillow?") ==
          "is there a cat on the pillow");
    CHECK(normalize_question("What  COLOR is  it?") == "what color is it");
    CHECK(normalize_question("What's on the man's head?") == "what's on the man's head");
    CHECK(normalize_question("'quoted'") == "quoted");
    CHECK_FALSE(normalize_question("???").has_value());
}

namespace {

std::string random_text(std::mt19937& rng) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyzABC  ..'?!,0123456789";
    std::uniform_int_distribution<size_t> len(0, 24);
    std::uniform_int_distribution<size_t> pick(0, sizeof(alphabet) - 2);
    std::string s;
    size_t n = len(rng);
    for (size_t i = 0; i < n; ++i) s.push_back(alphabet[pick(rng)]);
    return s;
}

}  // namespace

TEST_CASE("normalization is idempotent") {
    std::mt19937 rng(20210914);
    for (int i = 0; i < 2000; ++i) {
        std::string raw = random_text(rng);
        if (auto once = normalize_answer(raw)) {
            auto twice = normalize_answer(*once);
            REQUIRE(twice.has_value());
            CHECK(*twice == *once);
        }
        if (auto once = normalize_question(raw)) {
            auto twice = normalize_question(*once);
            REQUIRE(twice.has_value());
            CHECK(*twice == *once);
        }
    }
}

TEST_CASE("normalization keeps digit strings distinct") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> digits(0, 99999);
    for (int i = 0; i < 500; ++i) {
        int a = digits(rng), b = digits(rng);
        if (a == b) continue;
        auto na = normalize_answer(std::to_string(a));
        auto nb = normalize_answer(std::to_string(b));
        REQUIRE(na.has_value());
        REQUIRE(nb.has_value());
        CHECK(*na != *nb);
    }
}

TEST_CASE("answer_type_of") {
    CHECK(answer_type_of("yes") == AnswerType::yesno);
    CHECK(answer_type_of("no") == AnswerType::yesno);
    CHECK(answer_type_of("3") == AnswerType::number);
    CHECK(answer_type_of("42") == AnswerType::number);
    CHECK(answer_type_of("sheep") == AnswerType::other);
    CHECK(answer_type_of("3 dogs") == AnswerType::other);
}

TEST_CASE("augmented_id_base rounds up to the next power of ten") {
    CHECK(augmented_id_base(0) == 1);
    CHECK(augmented_id_base(7) == 10);
    CHECK(augmented_id_base(999) == 1000);
    CHECK(augmented_id_base(1000) == 10000);
    CHECK(augmented_id_base(409872) == 1000000);
}
