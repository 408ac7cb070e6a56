#pragma once
// The two verification strategies. Self-verification replays a question's
// rule on its own source image and requires it to reproduce the annotated
// answer; cross-verification compares a candidate against same-category,
// same-noun questions already annotated on the target image.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "simpleaug/analysis.hpp"
#include "simpleaug/ingest.hpp"
#include "simpleaug/parallel.hpp"
#include "simpleaug/propagate.hpp"
#include "simpleaug/types.hpp"

namespace simpleaug {

struct VerificationReport {
    std::int64_t questions_dropped_by_self_verify = 0;
    std::int64_t candidates_dropped_by_cross_verify = 0;
    std::map<std::string, std::int64_t> self_dropped_by_category;
    std::map<std::string, std::int64_t> cross_dropped_by_rule;
    std::vector<std::string> self_dropped_questions;  // unique normalized texts
};

// ---------------------------------------------------------------------------
// Self-verification

// Replays the category rule on the source image; true iff the derived
// answer equals the annotated one. A rule that cannot fire on the source
// image (noun absent, no evidence) fails verification.
inline bool self_verify(const AnalyzedQuestion& aq, const IqaTriplet& source,
                        const ImageEvidence& source_ev, const CategoryHierarchy& h,
                        const PropagationConfig& cfg, const NounLexicon& lex) {
    switch (aq.category) {
        case QuestionCategory::yesno: {
            auto derived = propagate_yesno(aq, source_ev, cfg, lex);
            return derived && *derived == source.answer;
        }
        case QuestionCategory::color: {
            for (const auto& cand : propagate_color(aq, source_ev, cfg, lex))
                if (!cand.replaced) return cand.answer == source.answer;
            return false;
        }
        case QuestionCategory::number: {
            auto derived = propagate_number(aq, source_ev, h, cfg);
            return derived && *derived == source.answer;
        }
        case QuestionCategory::what:
            return propagate_what(source.answer, aq, source_ev, h).has_value();
        case QuestionCategory::unsupported:
            return false;
    }
    return false;
}

// Keeps the questions whose rule reproduces at least one of their source
// triplets (a unique question may group several). Only questions the
// enabled rules would propagate are checked; the rest pass through.
inline std::pair<std::vector<AnalyzedQuestion>, VerificationReport> filter_self_verified(
    const std::vector<AnalyzedQuestion>& questions, const TripletCorpus& corpus,
    const EvidenceMap& evidence, const CategoryHierarchy& h, const PropagationConfig& cfg,
    const NounLexicon& lex, unsigned jobs = 1) {
    static const ImageEvidence kNoEvidence;
    std::vector<char> passed(questions.size(), 1);
    parallel_for(questions.size(), jobs, [&](std::size_t qi) {
        const AnalyzedQuestion& aq = questions[qi];
        if (!aq.propagatable || !cfg.rules_enabled.count(aq.category)) return;
        bool any = false;
        for (QuestionId qid : aq.source_question_ids) {
            const IqaTriplet* source = detail::find_triplet(corpus, qid);
            if (!source) continue;
            auto ev = evidence.find(source->image_id);
            const ImageEvidence& source_ev = ev == evidence.end() ? kNoEvidence : ev->second;
            if (self_verify(aq, *source, source_ev, h, cfg, lex)) {
                any = true;
                break;
            }
        }
        passed[qi] = any ? 1 : 0;
    });

    std::vector<AnalyzedQuestion> kept;
    kept.reserve(questions.size());
    VerificationReport report;
    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
        if (passed[qi]) {
            kept.push_back(questions[qi]);
        } else {
            ++report.questions_dropped_by_self_verify;
            report.self_dropped_by_category[std::string(to_string(questions[qi].category))] += 1;
            report.self_dropped_questions.push_back(questions[qi].question);
        }
    }
    return {std::move(kept), report};
}

// ---------------------------------------------------------------------------
// Cross-verification

// Analyses of the original unique questions, addressable by text.
class AnalysisLookup {
  public:
    explicit AnalysisLookup(const std::vector<AnalyzedQuestion>& questions) {
        for (const auto& aq : questions) by_question_[aq.question] = &aq;
    }
    const AnalyzedQuestion* find(const std::string& question) const {
        auto it = by_question_.find(question);
        return it == by_question_.end() ? nullptr : it->second;
    }

  private:
    std::map<std::string, const AnalyzedQuestion*> by_question_;
};

// Category + canonical noun set of the candidate's question text. Noun-
// replaced color questions are not in the corpus, so they are analyzed on
// the fly.
inline std::pair<QuestionCategory, std::vector<std::string>> question_signature(
    const std::string& question, const AnalysisLookup& lookup, const NounLexicon& lex,
    const ClassifierConfig& ccfg) {
    if (const AnalyzedQuestion* aq = lookup.find(question))
        return {aq->category, aq->nouns};
    QuestionCategory category = classify_question(question, ccfg);
    return {category, extract_nouns(question, category, lex, ccfg).nouns};
}

// True unless some annotated triplet on the candidate's image asks a
// same-category, same-noun question with a different answer. Vacuously
// true when no comparable triplet exists.
inline bool cross_verify(const AugmentedTriplet& candidate, const TripletCorpus& corpus,
                         const AnalysisLookup& lookup, const NounLexicon& lex,
                         const ClassifierConfig& ccfg = {}) {
    auto it = corpus.by_image.find(candidate.base.image_id);
    if (it == corpus.by_image.end()) return true;
    auto [category, nouns] = question_signature(candidate.base.question, lookup, lex, ccfg);
    for (std::size_t idx : it->second) {
        const IqaTriplet& annotated = corpus.triplets[idx];
        const AnalyzedQuestion* aq = lookup.find(annotated.question);
        if (!aq || aq->category != category || aq->nouns != nouns) continue;
        if (annotated.answer != candidate.base.answer) return false;
    }
    return true;
}

inline std::pair<std::vector<AugmentedTriplet>, VerificationReport> filter_cross_verified(
    std::vector<AugmentedTriplet> candidates, const TripletCorpus& corpus,
    const AnalysisLookup& lookup, const NounLexicon& lex, const ClassifierConfig& ccfg = {},
    unsigned jobs = 1) {
    std::vector<char> passed(candidates.size(), 1);
    parallel_for(candidates.size(), jobs, [&](std::size_t i) {
        passed[i] = cross_verify(candidates[i], corpus, lookup, lex, ccfg) ? 1 : 0;
    });
    VerificationReport report;
    std::vector<AugmentedTriplet> kept;
    kept.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (passed[i]) {
            candidates[i].cross_verified = CrossVerified::yes;
            kept.push_back(std::move(candidates[i]));
        } else {
            ++report.candidates_dropped_by_cross_verify;
            report.cross_dropped_by_rule[std::string(to_string(candidates[i].rule))] += 1;
        }
    }
    return {std::move(kept), report};
}

}  // namespace simpleaug
