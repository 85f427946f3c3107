#pragma once

// Brute-force reference implementation used only by tests. It works directly
// on raw documents (ASCII text only) and shares no code with the index,
// retrieval or fusion paths beyond the corpus data types.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erfusion/corpus.hpp"
#include "erfusion/extract.hpp"
#include "erfusion/fusion.hpp"
#include "erfusion/retrieval.hpp"

namespace erfusion::testing {

struct OracleMetaDoc {
    std::map<std::string, std::uint64_t> tf;
    std::uint64_t length = 0;
};

/// Keyed by "entity" or "first|second".
using OracleIndex = std::map<std::string, OracleMetaDoc>;

/// Lowercase ASCII, split on anything outside [a-z0-9].
std::vector<std::string> ascii_tokens(const std::string& text);

/// Term pseudo-frequencies evaluated literally: for every entity and every raw
/// document, the term counts of the document's sentences that mention the
/// entity, multiplied by the 0/1 presence weight, summed over documents.
OracleIndex oracle_entity_metadocs(const std::vector<AnnotatedDocument>& docs);

/// Same for entity pairs co-mentioned in a sentence.
OracleIndex oracle_pair_metadocs(const std::vector<AnnotatedDocument>& docs, bool unordered,
                                 ContextMode mode);

struct OracleStats {
    std::uint64_t total_terms = 0;
    std::uint64_t num_docs = 0;
    double avg_len = 0.0;
    std::map<std::string, std::uint64_t> coll_tf;
    std::map<std::string, std::uint64_t> doc_freq;
};

OracleStats oracle_stats(const OracleIndex& index);

struct OracleConfig {
    Model model = Model::lm;
    std::optional<double> mu_entity;
    std::optional<double> mu_rel;
    double k1 = 1.2;
    double b = 0.75;
    bool clamp_idf = true;
    FusionMode fusion = FusionMode::shifted;
    bool unordered = true;
    ContextMode context = ContextMode::separating_string;
    std::size_t top_m = 1000000;
};

/// Score of one meta-document, or nullopt when it contains no query term.
std::optional<double> oracle_score(const OracleMetaDoc& doc, const std::vector<std::string>& terms,
                                   const OracleStats& stats, const OracleConfig& config,
                                   bool entity_side);

/// Scores every n-tuple of corpus entities and returns the admissible ones
/// ranked by score descending, tuple id ascending.
std::vector<ScoredTuple> oracle_rank(const std::vector<AnnotatedDocument>& docs, const ERQuery& q,
                                     const OracleConfig& config);

}  // namespace erfusion::testing
