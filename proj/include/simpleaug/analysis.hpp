#pragma once
// Question analysis: category classification and lexicon-based noun
// extraction. Questions are analyzed once per unique normalized text;
// every propagation rule works off the AnalyzedQuestion it produces.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "simpleaug/ingest.hpp"
#include "simpleaug/text.hpp"
#include "simpleaug/types.hpp"

namespace simpleaug {

// ---------------------------------------------------------------------------
// NounLexicon

namespace detail {

// Pure suffix rules, no lexicon consultation; used while the lexicon is
// still being built.
inline std::string suffix_singular(const std::string& t) {
    auto ends_with = [&](std::string_view s, std::string_view suffix) {
        return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
    };
    if (t.size() >= 5 && ends_with(t, "ies")) return t.substr(0, t.size() - 3) + "y";
    if (t.size() >= 4 && ends_with(t, "es")) {
        std::string stem = t.substr(0, t.size() - 2);
        if (ends_with(stem, "x") || ends_with(stem, "z") || ends_with(stem, "ch") ||
            ends_with(stem, "sh") || ends_with(stem, "ss"))
            return stem;
    }
    if (t.size() >= 3 && t.back() == 's' && !ends_with(t, "ss"))
        return t.substr(0, t.size() - 1);
    return t;
}

}  // namespace detail

// Nouns the pipeline is able to match against image labels: COCO category
// and supercategory names, the detector vocabulary, plus an optional
// wordlist. Words in the stoplist ("picture" refers to the image itself,
// not an object in it) never become nouns. Built in two phases: names are
// collected first, finalize() then decides which are canonical — a name
// whose singular form is itself a known name (detector vocabularies list
// "dogs" next to "dog") stays an alias, while genuinely plural-shaped
// vocabulary like "skis" remains canonical.
struct NounLexicon {
    std::set<std::string> raw_names;                              // collected by add_name
    std::set<std::string> nouns;                                  // canonical, see finalize()
    std::map<std::string, std::string> irregular;                 // plural -> singular
    std::map<std::string, std::set<std::string>> irregular_plurals;  // singular -> plurals
    std::set<std::string> stoplist;

    static std::set<std::string> default_stoplist() {
        return {"picture", "photo", "image", "photograph"};
    }

    static NounLexicon make(std::set<std::string> stop = default_stoplist()) {
        NounLexicon lex;
        lex.stoplist = std::move(stop);
        static constexpr std::pair<const char*, const char*> kIrregular[] = {
            {"people", "person"}, {"men", "man"},       {"women", "woman"},
            {"children", "child"}, {"feet", "foot"},    {"teeth", "tooth"},
            {"geese", "goose"},   {"mice", "mouse"},    {"oxen", "ox"},
            {"sheep", "sheep"},   {"deer", "deer"},     {"fish", "fish"},
            {"knives", "knife"},  {"wives", "wife"},    {"lives", "life"},
            {"leaves", "leaf"},   {"loaves", "loaf"},   {"shelves", "shelf"},
            {"wolves", "wolf"},   {"calves", "calf"},   {"halves", "half"},
            {"scarves", "scarf"}, {"buses", "bus"},
        };
        for (const auto& [plural, singular] : kIrregular) {
            lex.irregular[plural] = singular;
            if (plural != singular) lex.irregular_plurals[singular].insert(plural);
        }
        // Singular forms are fixed points of singularize().
        for (const auto& [singular, plurals] : lex.irregular_plurals)
            lex.irregular[singular] = singular;
        return lex;
    }

    // Canonicalizes through the irregular map; refuses stoplist words.
    void add_name(std::string_view raw) {
        std::string name = to_lower_ascii(raw);
        if (name.empty()) return;
        if (auto it = irregular.find(name); it != irregular.end()) name = it->second;
        if (stoplist.count(name)) return;
        raw_names.insert(std::move(name));
    }

    void add_hierarchy(const CategoryHierarchy& h) {
        for (const auto& [category, super] : h.supercategory_of) add_name(category);
        for (const auto& [super, members] : h.members_of) add_name(super);
    }

    void add_detector_vocabulary(const std::map<ImageId, std::vector<DetectedObject>>& detections) {
        for (const auto& [image_id, objects] : detections)
            for (const auto& o : objects) add_name(o.name);
    }

    void finalize() {
        nouns.clear();
        for (const auto& name : raw_names) {
            std::string singular = detail::suffix_singular(name);
            if (singular != name && raw_names.count(singular)) continue;
            nouns.insert(name);
        }
    }
};

// One token per line; blank lines ignored.
inline std::vector<std::string> load_wordlist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        for (auto& token : split_tokens(line)) words.push_back(to_lower_ascii(token));
    }
    return words;
}

// ---------------------------------------------------------------------------
// Singular/plural handling

inline std::string pluralize(std::string_view singular) {
    std::string s(singular);
    auto ends_with = [&](std::string_view suffix) {
        return s.size() >= suffix.size() &&
               std::string_view(s).substr(s.size() - suffix.size()) == suffix;
    };
    if (ends_with("s") || ends_with("x") || ends_with("z") || ends_with("ch") ||
        ends_with("sh"))
        return s + "es";
    if (s.size() >= 2 && s.back() == 'y') {
        char before = s[s.size() - 2];
        if (before != 'a' && before != 'e' && before != 'i' && before != 'o' && before != 'u')
            return s.substr(0, s.size() - 1) + "ies";
    }
    return s + "s";
}

// Rule-based singularization. Irregular map first; a token that is itself a
// lexicon noun is already canonical (vocabulary names like "skis" or
// "glasses" stay as they are); then suffix rules. The "es" strip only
// fires where the stem visibly takes "es" or is a known noun, so applying
// the function twice changes nothing.
inline std::string singularize(std::string_view token, const NounLexicon& lex) {
    std::string t(token);
    if (auto it = lex.irregular.find(t); it != lex.irregular.end()) return it->second;
    auto finish = [&](std::string r) {
        if (auto it = lex.irregular.find(r); it != lex.irregular.end()) return it->second;
        return r;
    };
    if (lex.nouns.count(t)) return t;
    auto ends_with = [&](std::string_view s, std::string_view suffix) {
        return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
    };
    if (t.size() >= 5 && ends_with(t, "ies"))
        return finish(t.substr(0, t.size() - 3) + "y");
    if (t.size() >= 4 && ends_with(t, "es")) {
        std::string stem = t.substr(0, t.size() - 2);
        bool stem_takes_es = ends_with(stem, "x") || ends_with(stem, "z") ||
                             ends_with(stem, "ch") || ends_with(stem, "sh") ||
                             ends_with(stem, "ss");
        if (pluralize(stem) == t && (stem_takes_es || lex.nouns.count(stem)))
            return finish(std::move(stem));
    }
    if (t.size() >= 3 && t.back() == 's' && !ends_with(t, "ss"))
        return finish(t.substr(0, t.size() - 1));
    return t;
}

// Accepted surface tokens for a canonical noun: itself plus its plural
// form(s). Multiword names match labels only, never question tokens.
inline std::set<std::string> surface_forms_of(const std::string& canonical,
                                              const NounLexicon& lex) {
    std::set<std::string> surfaces{canonical};
    if (canonical.find(' ') != std::string::npos) return surfaces;
    if (auto it = lex.irregular_plurals.find(canonical); it != lex.irregular_plurals.end()) {
        surfaces.insert(it->second.begin(), it->second.end());
    } else {
        surfaces.insert(pluralize(canonical));
    }
    return surfaces;
}

// ---------------------------------------------------------------------------
// Question classification

struct ClassifierConfig {
    std::set<std::string> yesno_starters = {"is",  "are",  "was",   "were", "do",
                                            "does", "did",  "can",   "could", "has",
                                            "have", "had",  "will",  "would", "should"};
    std::set<std::string> color_keywords = {"color", "colour"};
};

// Total function; precedence number > color > what > yesno.
inline QuestionCategory classify_question(const std::string& normalized,
                                          const ClassifierConfig& cfg = {}) {
    std::vector<std::string> tokens = split_tokens(normalized);
    if (tokens.empty()) return QuestionCategory::unsupported;
    if (tokens.size() >= 2 && tokens[0] == "how" && tokens[1] == "many")
        return QuestionCategory::number;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        if (tokens[i] == "number" && tokens[i + 1] == "of") return QuestionCategory::number;
    for (const auto& token : tokens)
        if (cfg.color_keywords.count(token)) return QuestionCategory::color;
    if (tokens[0] == "what") return QuestionCategory::what;
    if (cfg.yesno_starters.count(tokens[0])) return QuestionCategory::yesno;
    return QuestionCategory::unsupported;
}

// ---------------------------------------------------------------------------
// Noun extraction

struct ExtractedNouns {
    std::vector<std::string> nouns;  // sorted canonical forms
    std::map<std::string, std::set<std::string>> surface_forms;
};

namespace detail {

// Index of the first token to consider after the question-type prefix.
inline std::size_t question_prefix_end(const std::vector<std::string>& tokens,
                                       QuestionCategory category,
                                       const ClassifierConfig& cfg) {
    static const std::set<std::string> kAux = {"is", "are", "was", "were", "do", "does", "did"};
    std::size_t i = 0;
    switch (category) {
        case QuestionCategory::number:
            if (tokens.size() >= 2 && tokens[0] == "how" && tokens[1] == "many") i = 2;
            break;
        case QuestionCategory::color:
            if (tokens.size() >= 2 && tokens[0] == "what" && cfg.color_keywords.count(tokens[1])) {
                i = 2;
                if (i < tokens.size() && kAux.count(tokens[i])) ++i;
            }
            break;
        case QuestionCategory::what:
            if (!tokens.empty() && tokens[0] == "what") {
                i = 1;
                if (i < tokens.size() && kAux.count(tokens[i])) ++i;
            }
            break;
        case QuestionCategory::yesno:
            if (!tokens.empty() && cfg.yesno_starters.count(tokens[0])) i = 1;
            break;
        case QuestionCategory::unsupported:
            break;
    }
    return i;
}

}  // namespace detail

inline ExtractedNouns extract_nouns(const std::string& normalized, QuestionCategory category,
                                    const NounLexicon& lex, const ClassifierConfig& cfg = {}) {
    ExtractedNouns out;
    std::vector<std::string> tokens = split_tokens(normalized);
    std::size_t begin = detail::question_prefix_end(tokens, category, cfg);
    std::set<std::string> seen;
    for (std::size_t i = begin; i < tokens.size(); ++i) {
        const std::string& token = tokens[i];
        if (lex.stoplist.count(token)) continue;
        if (cfg.color_keywords.count(token) || token == "number") continue;
        std::string canonical = singularize(token, lex);
        if (lex.stoplist.count(canonical)) continue;
        if (cfg.color_keywords.count(canonical) || canonical == "number") continue;
        if (!lex.nouns.count(canonical)) continue;
        auto [it, inserted] = seen.insert(canonical);
        (void)it;
        if (inserted) {
            out.surface_forms[canonical] = surface_forms_of(canonical, lex);
        }
        out.surface_forms[canonical].insert(token);
    }
    out.nouns.assign(seen.begin(), seen.end());
    return out;
}

// ---------------------------------------------------------------------------
// Supercategory expansion

inline std::vector<std::string> expand_supercategory(const std::string& noun,
                                                     const CategoryHierarchy& h) {
    if (auto it = h.members_of.find(noun); it != h.members_of.end())
        return {it->second.begin(), it->second.end()};
    return {noun};
}

// ---------------------------------------------------------------------------
// Unique-question grouping

struct AnalyzedQuestion {
    std::string question;  // normalized unique text
    QuestionCategory category = QuestionCategory::unsupported;
    std::vector<std::string> nouns;
    std::map<std::string, std::set<std::string>> surface_forms;
    std::vector<QuestionId> source_question_ids;  // sorted
    std::vector<ImageId> source_image_ids;        // sorted, unique
    bool propagatable = false;

    QuestionId min_question_id() const { return source_question_ids.front(); }
    bool has_source_image(ImageId id) const {
        return std::binary_search(source_image_ids.begin(), source_image_ids.end(), id);
    }
};

// Single-noun restriction applies to color/number/what; yes/no questions
// may mention several objects.
inline bool noun_arity_supported(QuestionCategory category, std::size_t noun_count) {
    switch (category) {
        case QuestionCategory::yesno:
            return noun_count >= 1;
        case QuestionCategory::color:
        case QuestionCategory::number:
        case QuestionCategory::what:
            return noun_count == 1;
        case QuestionCategory::unsupported:
            return false;
    }
    return false;
}

// One AnalyzedQuestion per unique normalized question, ordered by the
// smallest original question_id that uses it.
inline std::vector<AnalyzedQuestion> analyze_questions(const TripletCorpus& corpus,
                                                       const NounLexicon& lex,
                                                       const ClassifierConfig& cfg = {}) {
    std::vector<AnalyzedQuestion> analyzed;
    analyzed.reserve(corpus.by_question.size());
    for (const auto& [question, indexes] : corpus.by_question) {
        AnalyzedQuestion aq;
        aq.question = question;
        aq.category = classify_question(question, cfg);
        ExtractedNouns extracted = extract_nouns(question, aq.category, lex, cfg);
        aq.nouns = std::move(extracted.nouns);
        aq.surface_forms = std::move(extracted.surface_forms);
        for (std::size_t idx : indexes) {
            aq.source_question_ids.push_back(corpus.triplets[idx].question_id);
            aq.source_image_ids.push_back(corpus.triplets[idx].image_id);
        }
        std::sort(aq.source_question_ids.begin(), aq.source_question_ids.end());
        std::sort(aq.source_image_ids.begin(), aq.source_image_ids.end());
        aq.source_image_ids.erase(
            std::unique(aq.source_image_ids.begin(), aq.source_image_ids.end()),
            aq.source_image_ids.end());
        aq.propagatable = noun_arity_supported(aq.category, aq.nouns.size());
        analyzed.push_back(std::move(aq));
    }
    std::sort(analyzed.begin(), analyzed.end(),
              [](const AnalyzedQuestion& a, const AnalyzedQuestion& b) {
                  return a.min_question_id() < b.min_question_id();
              });
    return analyzed;
}

// Does a detected/annotated label name refer to this noun? Exact match
// after lowercasing and singularization; no fuzzy matching.
inline bool label_matches_noun(const std::string& label, const std::string& canonical,
                               const std::set<std::string>& surfaces, const NounLexicon& lex) {
    if (label == canonical) return true;
    if (surfaces.count(label)) return true;
    return singularize(label, lex) == canonical;
}

}  // namespace simpleaug
