#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erfusion/index.hpp"

namespace erfusion {

/// Tokenized sub-query against one of the two indexes.
struct SubQuery {
    std::vector<std::string> terms;  // non-empty, duplicates allowed
    IndexKind target = IndexKind::entity;

    friend bool operator==(const SubQuery&, const SubQuery&) = default;
};

enum class Model { lm, bm25 };

/// Whether negative BM25 IDF values (n(t) > N/2) are clamped to zero.
enum class IdfFloor { clamp_zero, raw };

struct ModelParams {
    Model model = Model::lm;
    std::optional<double> mu_entity;  // nullopt: average meta-document length
    std::optional<double> mu_rel;     // nullopt: average meta-document length
    double k1 = 1.2;
    double b = 0.75;
    IdfFloor idf_floor = IdfFloor::clamp_zero;

    /// Throws ParameterError on out-of-range values.
    void validate() const;

    /// Dirichlet prior for an index; auto resolves to its average length.
    double resolve_mu(const Index& index) const;
};

/// Dirichlet-smoothed query log-likelihood (natural log). Query terms that
/// never occur in the collection are skipped.
double score_lm(const MetaDocument& meta, std::span<const std::string> terms,
                const CollectionStats& stats, double mu);

/// Okapi BM25 over the meta-document collection. Terms with n(t) = 0 add 0.
double score_bm25(const MetaDocument& meta, std::span<const std::string> terms,
                  const CollectionStats& stats, double k1, double b,
                  IdfFloor idf_floor = IdfFloor::clamp_zero);

/// ln((N - n + 0.5) / (n + 0.5)), clamped at 0 under IdfFloor::clamp_zero.
double bm25_idf(std::uint64_t num_docs, std::uint64_t doc_freq, IdfFloor idf_floor);

/// The saturating tf component of BM25 for one term.
double bm25_tf_weight(std::uint64_t tf, std::uint64_t length, double avg_len, double k1, double b);

double score_meta(const MetaDocument& meta, const SubQuery& q, const Index& index,
                  const ModelParams& params);

struct Candidate {
    MetaKey key;
    double score = 0.0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Orders by score descending, then key ascending.
bool candidate_before(const Candidate& a, const Candidate& b);

/// Scores every meta-document that contains at least one query term and
/// returns the best k. Throws ParameterError when the index kind does not
/// match the sub-query target, k is 0, or the parameters are invalid.
std::vector<Candidate> candidate_search(const Index& index, const SubQuery& q,
                                        const ModelParams& params, std::size_t k);

}  // namespace erfusion
