#pragma once
// Paraphrasing by similar questions: encode each unique question as the
// mean of its word vectors, pair questions whose cosine similarity clears
// the threshold, and swap questions between their triplets under the
// rare-answer gate. Exact brute-force search; no approximate index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "simpleaug/ingest.hpp"
#include "simpleaug/parallel.hpp"
#include "simpleaug/types.hpp"

namespace simpleaug {

struct QuestionVector {
    std::string question;       // normalized text
    std::vector<float> vector;  // arithmetic mean of in-vocabulary token vectors
    double norm = 0.0;
    double token_coverage = 0.0;
};

// Cosine over the stored float components, accumulated in double. The
// float-by-float products are exact in double, so cosine(v, v) stays
// within 1e-9 of 1.
inline double cosine(const QuestionVector& a, const QuestionVector& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.vector.size(); ++i)
        dot += static_cast<double>(a.vector[i]) * static_cast<double>(b.vector[i]);
    return dot / (a.norm * b.norm);
}

inline std::optional<QuestionVector> encode_question(const std::string& normalized,
                                                     const EmbeddingTable& emb) {
    std::vector<std::string> tokens = split_tokens(normalized);
    if (tokens.empty()) return std::nullopt;
    std::vector<double> sum(emb.dimension, 0.0);
    std::size_t in_vocab = 0;
    for (const auto& token : tokens) {
        const std::vector<float>* vec = emb.find(token);
        if (!vec) continue;
        ++in_vocab;
        for (std::size_t i = 0; i < emb.dimension; ++i) sum[i] += (*vec)[i];
    }
    if (in_vocab == 0) return std::nullopt;

    QuestionVector qv;
    qv.question = normalized;
    qv.vector.resize(emb.dimension);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < emb.dimension; ++i) {
        qv.vector[i] = static_cast<float>(sum[i] / static_cast<double>(in_vocab));
        norm_sq += static_cast<double>(qv.vector[i]) * static_cast<double>(qv.vector[i]);
    }
    qv.norm = std::sqrt(norm_sq);
    qv.token_coverage = static_cast<double>(in_vocab) / static_cast<double>(tokens.size());
    return qv;
}

// ---------------------------------------------------------------------------
// Index over unique questions

struct ParaphraseParams {
    double threshold = 0.98;  // cosine >= threshold means "similar"
    int top_k = 3;
    int rare_max = 5;         // emit only answers with fewer corpus pairs
    bool gate_both_directions = true;
};

struct ParaphraseEntry {
    QuestionVector qv;
    // (image_id, answer, question_id) of every original triplet with this
    // question, ordered by question_id.
    std::vector<std::tuple<ImageId, std::string, QuestionId>> triplets;
    // Projection of the unit vector onto the index's reference direction;
    // used to skip pairs that provably fall below the threshold.
    double projection = 0.0;
};

struct ParaphraseReport {
    std::int64_t questions_indexed = 0;
    std::int64_t questions_excluded = 0;  // no in-vocabulary token or zero norm
    std::int64_t emitted = 0;
    std::int64_t suppressed_by_rarity = 0;
};

struct ParaphraseIndex {
    std::vector<ParaphraseEntry> entries;  // ordered by smallest question_id
    ParaphraseParams params;
    std::int64_t questions_excluded = 0;
    std::vector<double> reference_direction;  // unit vector; empty disables pruning

    // cos(u, v) >= t forces |u - v| <= sqrt(2 - 2t) for unit vectors, so a
    // projection gap beyond that (plus rounding slack) cannot clear the
    // threshold. Pruning is exact: skipped pairs are provably dissimilar.
    double projection_bound() const {
        double t = params.threshold;
        if (t > 1.0) t = 1.0;
        return std::sqrt(std::max(0.0, 2.0 - 2.0 * t)) + 1e-6;
    }
};

inline ParaphraseIndex build_paraphrase_index(const TripletCorpus& corpus,
                                              const EmbeddingTable& emb,
                                              const ParaphraseParams& params = {}) {
    ParaphraseIndex index;
    index.params = params;
    for (const auto& [question, idxs] : corpus.by_question) {
        auto qv = encode_question(question, emb);
        if (!qv || qv->norm == 0.0) {
            ++index.questions_excluded;
            continue;
        }
        ParaphraseEntry entry;
        entry.qv = std::move(*qv);
        for (std::size_t idx : idxs) {
            const IqaTriplet& t = corpus.triplets[idx];
            entry.triplets.emplace_back(t.image_id, t.answer, t.question_id);
        }
        std::sort(entry.triplets.begin(), entry.triplets.end(),
                  [](const auto& a, const auto& b) { return std::get<2>(a) < std::get<2>(b); });
        index.entries.push_back(std::move(entry));
    }
    std::sort(index.entries.begin(), index.entries.end(),
              [](const ParaphraseEntry& a, const ParaphraseEntry& b) {
                  return std::get<2>(a.triplets.front()) < std::get<2>(b.triplets.front());
              });

    // Reference direction for pruning: the unit vectors' top principal
    // direction (deterministic power iteration). Any fixed unit direction
    // keeps the bound exact; the principal one separates projections even
    // when the embeddings share a dominant component.
    if (index.entries.size() >= 2) {
        const std::size_t d = emb.dimension;
        std::vector<std::vector<double>> units;
        units.reserve(index.entries.size());
        std::vector<double> mean(d, 0.0);
        for (const auto& entry : index.entries) {
            std::vector<double> u(d);
            for (std::size_t i = 0; i < d; ++i)
                u[i] = static_cast<double>(entry.qv.vector[i]) / entry.qv.norm;
            for (std::size_t i = 0; i < d; ++i) mean[i] += u[i];
            units.push_back(std::move(u));
        }
        for (double& m : mean) m /= static_cast<double>(units.size());

        // Start along the axis with the largest centered variance.
        std::vector<double> variance(d, 0.0);
        for (const auto& u : units)
            for (std::size_t i = 0; i < d; ++i)
                variance[i] += (u[i] - mean[i]) * (u[i] - mean[i]);
        std::size_t start = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (variance[i] > variance[start]) start = i;

        std::vector<double> r(d, 0.0);
        r[start] = 1.0;
        for (int iteration = 0; iteration < 10; ++iteration) {
            std::vector<double> next(d, 0.0);
            for (const auto& u : units) {
                double centered_dot = 0.0;
                for (std::size_t i = 0; i < d; ++i) centered_dot += (u[i] - mean[i]) * r[i];
                for (std::size_t i = 0; i < d; ++i) next[i] += (u[i] - mean[i]) * centered_dot;
            }
            double norm_sq = 0.0;
            for (double x : next) norm_sq += x * x;
            if (norm_sq <= 0.0) break;
            double norm = std::sqrt(norm_sq);
            for (std::size_t i = 0; i < d; ++i) r[i] = next[i] / norm;
        }
        double r_norm_sq = 0.0;
        for (double x : r) r_norm_sq += x * x;
        if (std::abs(r_norm_sq - 1.0) < 1e-6) {
            index.reference_direction = std::move(r);
            for (std::size_t e = 0; e < index.entries.size(); ++e) {
                double dot = 0.0;
                for (std::size_t i = 0; i < d; ++i)
                    dot += index.reference_direction[i] * units[e][i];
                index.entries[e].projection = dot;
            }
        }
    }
    return index;
}

inline double query_projection(const QuestionVector& query, const ParaphraseIndex& index) {
    if (index.reference_direction.empty()) return 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < query.vector.size(); ++i)
        dot += index.reference_direction[i] * static_cast<double>(query.vector[i]);
    return dot / query.norm;
}

struct SimilarQuestion {
    std::size_t entry_index;
    std::string question;
    double cosine;
};

// All distinct questions with cosine >= threshold, best first (ties broken
// by question text), truncated to top_k. Never returns the query itself.
inline std::vector<SimilarQuestion> find_similar(const QuestionVector& query,
                                                 const ParaphraseIndex& index) {
    const bool prune = !index.reference_direction.empty() &&
                       index.reference_direction.size() == query.vector.size();
    const double bound = index.projection_bound();
    const double query_proj = prune ? query_projection(query, index) : 0.0;
    std::vector<SimilarQuestion> hits;
    for (std::size_t i = 0; i < index.entries.size(); ++i) {
        const ParaphraseEntry& entry = index.entries[i];
        if (prune && std::abs(entry.projection - query_proj) > bound) continue;
        if (entry.qv.question == query.question) continue;
        double c = cosine(query, entry.qv);
        if (c >= index.params.threshold) hits.push_back({i, entry.qv.question, c});
    }
    std::sort(hits.begin(), hits.end(), [](const SimilarQuestion& a, const SimilarQuestion& b) {
        if (a.cosine != b.cosine) return a.cosine > b.cosine;
        return a.question < b.question;
    });
    if (hits.size() > static_cast<std::size_t>(index.params.top_k))
        hits.resize(static_cast<std::size_t>(index.params.top_k));
    return hits;
}

// ---------------------------------------------------------------------------
// Question swapping

namespace detail {

inline AugmentedTriplet make_paraphrase(ImageId image, std::string question, std::string answer,
                                        QuestionId source_qid) {
    AugmentedTriplet t;
    t.base.image_id = image;
    t.base.question = std::move(question);
    t.base.answer = std::move(answer);
    t.base.answer_type = answer_type_of(t.base.answer);
    t.base.source = TripletSource::paraphrased;
    t.rule = Rule::paraphrase;
    t.source_question_id = source_qid;
    t.source_image_id = image;
    t.cross_verified = CrossVerified::not_applicable;
    return t;
}

}  // namespace detail

// For every question q and its top-k similar questions q', swaps the
// questions between their triplets: q onto q'-triplets and q' onto
// q-triplets. Each emission is gated by the rare-answer rule on its new
// (question, answer) pairing; with gate_both_directions=false only the
// swapped-in-q direction is gated, as stated in the source procedure.
inline std::pair<std::vector<AugmentedTriplet>, ParaphraseReport> paraphrase_swap(
    const TripletCorpus& corpus, const ParaphraseIndex& index, unsigned jobs = 1) {
    const int rare_max = index.params.rare_max;
    struct Local {
        std::vector<AugmentedTriplet> out;
        std::int64_t suppressed = 0;
    };
    std::vector<Local> locals(index.entries.size());

    parallel_for(index.entries.size(), jobs, [&](std::size_t qi) {
        const ParaphraseEntry& q = index.entries[qi];
        Local& local = locals[qi];
        for (const auto& similar : find_similar(q.qv, index)) {
            const ParaphraseEntry& other = index.entries[similar.entry_index];
            // (i', q, a'): question q onto the similar question's triplets.
            for (const auto& [image, answer, qid] : other.triplets) {
                if (corpus.answer_pair_count(q.qv.question, answer) < rare_max) {
                    local.out.push_back(
                        detail::make_paraphrase(image, q.qv.question, answer, qid));
                } else {
                    ++local.suppressed;
                }
            }
            // (i, q', a): the similar question onto q's own triplets.
            for (const auto& [image, answer, qid] : q.triplets) {
                if (!index.params.gate_both_directions ||
                    corpus.answer_pair_count(similar.question, answer) < rare_max) {
                    local.out.push_back(
                        detail::make_paraphrase(image, similar.question, answer, qid));
                } else {
                    ++local.suppressed;
                }
            }
        }
    });

    ParaphraseReport report;
    report.questions_indexed = static_cast<std::int64_t>(index.entries.size());
    report.questions_excluded = index.questions_excluded;
    std::vector<AugmentedTriplet> out;
    for (auto& local : locals) {
        report.suppressed_by_rarity += local.suppressed;
        for (auto& t : local.out) out.push_back(std::move(t));
    }
    report.emitted = static_cast<std::int64_t>(out.size());
    return {std::move(out), report};
}

}  // namespace simpleaug
