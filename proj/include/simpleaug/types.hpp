#pragma once
// Shared domain types for the augmentation pipeline.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "simpleaug/text.hpp"

namespace simpleaug {

using QuestionId = std::int64_t;
using ImageId = std::int64_t;

// VQA answer types ("yes/no", "number", "other" in the release files).
enum class AnswerType { yesno, number, other };

enum class TripletSource { original, propagated, paraphrased };

enum class QuestionCategory { yesno, color, number, what, unsupported };

// Which rule produced an augmented triplet.
enum class Rule {
    yesno_yes,
    yesno_no,
    color,
    color_replaced,
    number,
    what,
    paraphrase,
};

enum class CrossVerified { yes, no, not_applicable };

struct IqaTriplet {
    QuestionId question_id = 0;
    ImageId image_id = 0;
    std::string question;             // normalized text
    std::string answer;               // normalized text
    AnswerType answer_type = AnswerType::other;
    TripletSource source = TripletSource::original;

    bool operator==(const IqaTriplet&) const = default;
};

struct AugmentedTriplet {
    IqaTriplet base;                  // source = propagated | paraphrased
    Rule rule = Rule::yesno_yes;
    QuestionId source_question_id = 0;
    ImageId source_image_id = 0;
    bool self_verified = false;
    CrossVerified cross_verified = CrossVerified::not_applicable;

    bool operator==(const AugmentedTriplet&) const = default;
};

inline AnswerType answer_type_of(std::string_view normalized_answer) {
    if (normalized_answer == "yes" || normalized_answer == "no") return AnswerType::yesno;
    if (is_digit_string(normalized_answer)) return AnswerType::number;
    return AnswerType::other;
}

inline std::string_view to_string(AnswerType t) {
    switch (t) {
        case AnswerType::yesno: return "yes/no";
        case AnswerType::number: return "number";
        case AnswerType::other: return "other";
    }
    return "other";
}

inline AnswerType answer_type_from_string(std::string_view s) {
    if (s == "yes/no" || s == "yesno") return AnswerType::yesno;
    if (s == "number") return AnswerType::number;
    return AnswerType::other;
}

inline std::string_view to_string(TripletSource s) {
    switch (s) {
        case TripletSource::original: return "original";
        case TripletSource::propagated: return "propagated";
        case TripletSource::paraphrased: return "paraphrased";
    }
    return "original";
}

inline std::string_view to_string(QuestionCategory c) {
    switch (c) {
        case QuestionCategory::yesno: return "yesno";
        case QuestionCategory::color: return "color";
        case QuestionCategory::number: return "number";
        case QuestionCategory::what: return "what";
        case QuestionCategory::unsupported: return "unsupported";
    }
    return "unsupported";
}

inline std::string_view to_string(Rule r) {
    switch (r) {
        case Rule::yesno_yes: return "yesno_yes";
        case Rule::yesno_no: return "yesno_no";
        case Rule::color: return "color";
        case Rule::color_replaced: return "color_replaced";
        case Rule::number: return "number";
        case Rule::what: return "what";
        case Rule::paraphrase: return "paraphrase";
    }
    return "yesno_yes";
}

inline std::optional<Rule> rule_from_string(std::string_view s) {
    if (s == "yesno_yes") return Rule::yesno_yes;
    if (s == "yesno_no") return Rule::yesno_no;
    if (s == "color") return Rule::color;
    if (s == "color_replaced") return Rule::color_replaced;
    if (s == "number") return Rule::number;
    if (s == "what") return Rule::what;
    if (s == "paraphrase") return Rule::paraphrase;
    return std::nullopt;
}

// First id handed to augmented triplets: the smallest power of ten strictly
// above every original question_id, so provenance is readable at a glance.
inline QuestionId augmented_id_base(QuestionId max_original_id) {
    QuestionId base = 1;
    while (base <= max_original_id) {
        if (base > std::numeric_limits<QuestionId>::max() / 10)
            throw std::overflow_error("augmented_id_base: question id space exhausted");
        base *= 10;
    }
    return base;
}

// Fatal problem with an input file (missing, malformed, schema violation).
class LoadError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (bad flag combination, missing path).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace simpleaug
