#pragma once
// The four question-propagation rules. Yes/no and color read detector
// output (the only source with attributes); number and what read ground-
// truth instance annotations. Candidates are produced in a deterministic
// order that is independent of the worker count.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "simpleaug/analysis.hpp"
#include "simpleaug/ingest.hpp"
#include "simpleaug/parallel.hpp"
#include "simpleaug/types.hpp"

namespace simpleaug {

struct PropagationConfig {
    std::set<QuestionCategory> rules_enabled = {QuestionCategory::yesno, QuestionCategory::color,
                                                QuestionCategory::number, QuestionCategory::what};
    double min_score = 0.0;          // detector score floor for rule matching
    std::optional<int> max_count;    // drop number answers above this
    std::set<std::string> color_vocabulary = {
        "black", "white", "red",  "green", "blue",   "yellow", "brown",
        "orange", "gray", "pink", "purple", "tan",   "gold",   "silver"};
};

// ---------------------------------------------------------------------------
// Per-rule primitives

// Nouns of aq covered by the image's detections (score floor applied).
inline std::set<std::string> detected_noun_coverage(const AnalyzedQuestion& aq,
                                                    const ImageEvidence& ev,
                                                    const PropagationConfig& cfg,
                                                    const NounLexicon& lex) {
    std::set<std::string> covered;
    for (const auto& noun : aq.nouns) {
        const auto& surfaces = aq.surface_forms.at(noun);
        for (const auto& object : ev.detected_objects) {
            if (object.score < cfg.min_score) continue;
            if (label_matches_noun(object.name, noun, surfaces, lex)) {
                covered.insert(noun);
                break;
            }
        }
    }
    return covered;
}

// Yes if the labels cover all nouns, no if only some; an image with no
// overlap at all is ignored.
inline std::optional<std::string> propagate_yesno(const AnalyzedQuestion& aq,
                                                  const ImageEvidence& ev,
                                                  const PropagationConfig& cfg,
                                                  const NounLexicon& lex) {
    if (aq.nouns.empty()) return std::nullopt;
    std::set<std::string> covered = detected_noun_coverage(aq, ev, cfg, lex);
    if (covered.empty()) return std::nullopt;
    return covered.size() == aq.nouns.size() ? std::optional<std::string>("yes")
                                             : std::optional<std::string>("no");
}

// Ground-truth instance count over the noun's (expanded) categories.
inline int annotated_instance_count(const std::string& noun, const ImageEvidence& ev,
                                    const CategoryHierarchy& h) {
    int count = 0;
    for (const auto& category : expand_supercategory(noun, h)) {
        auto it = ev.annotated_instances.find(category);
        if (it != ev.annotated_instances.end()) count += it->second;
    }
    return count;
}

inline std::optional<std::string> propagate_number(const AnalyzedQuestion& aq,
                                                   const ImageEvidence& ev,
                                                   const CategoryHierarchy& h,
                                                   const PropagationConfig& cfg) {
    if (aq.nouns.size() != 1) return std::nullopt;
    int count = annotated_instance_count(aq.nouns.front(), ev, h);
    if (count < 1) return std::nullopt;
    if (cfg.max_count && count > *cfg.max_count) return std::nullopt;
    return std::to_string(count);
}

// Emits the source answer when the image covers the noun and its labels
// contain the answer itself.
inline std::optional<std::string> propagate_what(const std::string& source_answer,
                                                 const AnalyzedQuestion& aq,
                                                 const ImageEvidence& ev,
                                                 const CategoryHierarchy& h) {
    if (aq.nouns.size() != 1) return std::nullopt;
    if (annotated_instance_count(aq.nouns.front(), ev, h) < 1) return std::nullopt;
    auto it = ev.annotated_instances.find(source_answer);
    if (it == ev.annotated_instances.end() || it->second < 1) return std::nullopt;
    return source_answer;
}

struct ColorCandidate {
    std::string question;
    std::string answer;
    bool replaced = false;  // noun substituted by another detected name
};

namespace detail {

// Distinct in-vocabulary colors attached to a group of detections; a name
// with conflicting colors is ambiguous and yields nothing.
inline std::optional<std::string> unique_color(const std::set<std::string>& colors) {
    if (colors.size() == 1) return *colors.begin();
    return std::nullopt;
}

inline std::string replace_first_token(const std::string& question, const std::string& from,
                                       const std::string& to) {
    std::vector<std::string> tokens = split_tokens(question);
    for (auto& token : tokens) {
        if (token == from) {
            token = to;
            break;
        }
    }
    return join_tokens(tokens);
}

}  // namespace detail

// Color rule. The image must cover the noun; the direct candidate uses the
// noun's own unambiguous color, and each other detected name with an
// unambiguous color yields a noun-replaced candidate.
inline std::vector<ColorCandidate> propagate_color(const AnalyzedQuestion& aq,
                                                   const ImageEvidence& ev,
                                                   const PropagationConfig& cfg,
                                                   const NounLexicon& lex) {
    std::vector<ColorCandidate> out;
    if (aq.nouns.size() != 1) return out;
    const std::string& noun = aq.nouns.front();
    const auto& surfaces = aq.surface_forms.at(noun);

    // Group in-vocabulary colors by detected name; track which names match
    // the question noun.
    std::map<std::string, std::set<std::string>> colors_by_name;
    std::set<std::string> noun_names;
    bool noun_covered = false;
    for (const auto& object : ev.detected_objects) {
        if (object.score < cfg.min_score) continue;
        bool matches = label_matches_noun(object.name, noun, surfaces, lex);
        noun_covered = noun_covered || matches;
        if (matches) noun_names.insert(object.name);
        auto& colors = colors_by_name[object.name];
        for (const auto& attr : object.attributes)
            if (cfg.color_vocabulary.count(attr)) colors.insert(attr);
    }
    if (!noun_covered) return out;

    // Direct: one distinct color across all instances matching the noun.
    std::set<std::string> noun_colors;
    for (const auto& name : noun_names) noun_colors.insert(colors_by_name[name].begin(),
                                                           colors_by_name[name].end());
    if (auto color = detail::unique_color(noun_colors))
        out.push_back({aq.question, *color, false});

    // Replacement: every other detected name with one distinct color.
    // The question token actually present decides what gets substituted.
    std::string question_surface;
    for (const auto& token : split_tokens(aq.question)) {
        if (surfaces.count(token) || singularize(token, lex) == noun) {
            question_surface = token;
            break;
        }
    }
    if (question_surface.empty()) return out;
    for (const auto& [name, colors] : colors_by_name) {
        if (noun_names.count(name)) continue;
        if (colors.empty()) continue;
        if (auto color = detail::unique_color(colors)) {
            out.push_back(
                {detail::replace_first_token(aq.question, question_surface, name), *color, true});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inverted evidence index: which images can a rule possibly fire on?

struct EvidenceIndex {
    std::map<std::string, std::vector<ImageId>> images_by_detected;  // singularized name
    std::map<std::string, std::vector<ImageId>> images_by_category;

    const std::vector<ImageId>& detected(const std::string& noun) const {
        static const std::vector<ImageId> kEmpty;
        auto it = images_by_detected.find(noun);
        return it == images_by_detected.end() ? kEmpty : it->second;
    }
    const std::vector<ImageId>& category(const std::string& name) const {
        static const std::vector<ImageId> kEmpty;
        auto it = images_by_category.find(name);
        return it == images_by_category.end() ? kEmpty : it->second;
    }
};

inline EvidenceIndex build_evidence_index(const EvidenceMap& evidence, const NounLexicon& lex) {
    EvidenceIndex index;
    std::map<std::string, std::set<ImageId>> detected, category;
    for (const auto& [image_id, ev] : evidence) {
        for (const auto& object : ev.detected_objects)
            detected[singularize(object.name, lex)].insert(image_id);
        for (const auto& [name, count] : ev.annotated_instances)
            if (count > 0) category[name].insert(image_id);
    }
    for (auto& [key, ids] : detected)
        index.images_by_detected[key] = {ids.begin(), ids.end()};
    for (auto& [key, ids] : category)
        index.images_by_category[key] = {ids.begin(), ids.end()};
    return index;
}

// ---------------------------------------------------------------------------
// propagate_all

struct PropagationReport {
    std::map<std::string, std::int64_t> candidates_by_rule;
    std::int64_t questions_processed = 0;
    std::int64_t questions_propagatable = 0;

    std::int64_t total_candidates() const {
        std::int64_t total = 0;
        for (const auto& [rule, count] : candidates_by_rule) total += count;
        return total;
    }
};

namespace detail {

inline AugmentedTriplet make_candidate(ImageId target, std::string question, std::string answer,
                                       Rule rule, QuestionId source_qid, ImageId source_image) {
    AugmentedTriplet t;
    t.base.image_id = target;
    t.base.question = std::move(question);
    t.base.answer = std::move(answer);
    t.base.answer_type = answer_type_of(t.base.answer);
    t.base.source = TripletSource::propagated;
    t.rule = rule;
    t.source_question_id = source_qid;
    t.source_image_id = source_image;
    return t;
}

inline const IqaTriplet* find_triplet(const TripletCorpus& corpus, QuestionId qid) {
    auto it = std::lower_bound(
        corpus.triplets.begin(), corpus.triplets.end(), qid,
        [](const IqaTriplet& t, QuestionId id) { return t.question_id < id; });
    if (it == corpus.triplets.end() || it->question_id != qid) return nullptr;
    return &*it;
}

// Candidate target images for one question, smallest id first, source
// images excluded.
inline std::vector<ImageId> candidate_images(const AnalyzedQuestion& aq,
                                             const EvidenceIndex& index,
                                             const CategoryHierarchy& h) {
    std::set<ImageId> ids;
    switch (aq.category) {
        case QuestionCategory::yesno:
            for (const auto& noun : aq.nouns) {
                const auto& hits = index.detected(noun);
                ids.insert(hits.begin(), hits.end());
            }
            break;
        case QuestionCategory::color: {
            const auto& hits = index.detected(aq.nouns.front());
            ids.insert(hits.begin(), hits.end());
            break;
        }
        case QuestionCategory::number:
        case QuestionCategory::what:
            for (const auto& category : expand_supercategory(aq.nouns.front(), h)) {
                const auto& hits = index.category(category);
                ids.insert(hits.begin(), hits.end());
            }
            break;
        case QuestionCategory::unsupported:
            break;
    }
    std::vector<ImageId> out;
    out.reserve(ids.size());
    for (ImageId id : ids)
        if (!aq.has_source_image(id)) out.push_back(id);
    return out;
}

}  // namespace detail

// Applies the enabled rule to every (unique question, candidate image)
// pair. `questions` must already be filtered to self-verified,
// propagatable questions. Output is sorted by (source question id, target
// image id, rule, question, answer), so bytes do not depend on `jobs`.
inline std::pair<std::vector<AugmentedTriplet>, PropagationReport> propagate_all(
    const std::vector<AnalyzedQuestion>& questions, const EvidenceMap& evidence,
    const EvidenceIndex& index, const CategoryHierarchy& h, const TripletCorpus& corpus,
    const PropagationConfig& cfg, const NounLexicon& lex, unsigned jobs = 1) {
    std::vector<std::vector<AugmentedTriplet>> per_question(questions.size());

    parallel_for(questions.size(), jobs, [&](std::size_t qi) {
        const AnalyzedQuestion& aq = questions[qi];
        if (!aq.propagatable || !cfg.rules_enabled.count(aq.category)) return;
        auto& out = per_question[qi];
        QuestionId min_qid = aq.min_question_id();

        // For "what" questions the answer comes from the source triplet;
        // propagate each distinct source answer once.
        std::vector<std::pair<std::string, std::pair<QuestionId, ImageId>>> what_sources;
        if (aq.category == QuestionCategory::what) {
            std::set<std::string> seen;
            for (QuestionId qid : aq.source_question_ids) {
                const IqaTriplet* t = detail::find_triplet(corpus, qid);
                if (!t) continue;
                if (seen.insert(t->answer).second)
                    what_sources.push_back({t->answer, {t->question_id, t->image_id}});
            }
        }

        const IqaTriplet* min_triplet = detail::find_triplet(corpus, min_qid);
        ImageId min_source_image = min_triplet ? min_triplet->image_id : 0;
        for (ImageId target : detail::candidate_images(aq, index, h)) {
            const ImageEvidence& ev = evidence.at(target);
            switch (aq.category) {
                case QuestionCategory::yesno: {
                    if (auto answer = propagate_yesno(aq, ev, cfg, lex)) {
                        Rule rule = *answer == "yes" ? Rule::yesno_yes : Rule::yesno_no;
                        out.push_back(detail::make_candidate(target, aq.question, *answer, rule,
                                                             min_qid, min_source_image));
                    }
                    break;
                }
                case QuestionCategory::color: {
                    for (auto& cand : propagate_color(aq, ev, cfg, lex)) {
                        out.push_back(detail::make_candidate(
                            target, std::move(cand.question), std::move(cand.answer),
                            cand.replaced ? Rule::color_replaced : Rule::color, min_qid,
                            min_source_image));
                    }
                    break;
                }
                case QuestionCategory::number: {
                    if (auto answer = propagate_number(aq, ev, h, cfg)) {
                        out.push_back(detail::make_candidate(target, aq.question, *answer,
                                                             Rule::number, min_qid,
                                                             min_source_image));
                    }
                    break;
                }
                case QuestionCategory::what: {
                    for (const auto& [answer, source] : what_sources) {
                        if (auto derived = propagate_what(answer, aq, ev, h)) {
                            out.push_back(detail::make_candidate(target, aq.question, *derived,
                                                                 Rule::what, source.first,
                                                                 source.second));
                        }
                    }
                    break;
                }
                case QuestionCategory::unsupported:
                    break;
            }
        }
    });

    PropagationReport report;
    report.questions_processed = static_cast<std::int64_t>(questions.size());
    std::vector<AugmentedTriplet> candidates;
    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
        if (questions[qi].propagatable && cfg.rules_enabled.count(questions[qi].category))
            ++report.questions_propagatable;
        for (auto& t : per_question[qi]) candidates.push_back(std::move(t));
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const AugmentedTriplet& a, const AugmentedTriplet& b) {
                  return std::tie(a.source_question_id, a.base.image_id, a.rule, a.base.question,
                                  a.base.answer) <
                         std::tie(b.source_question_id, b.base.image_id, b.rule, b.base.question,
                                  b.base.answer);
              });
    for (const auto& t : candidates)
        report.candidates_by_rule[std::string(to_string(t.rule))] += 1;
    return {std::move(candidates), report};
}

}  // namespace simpleaug
