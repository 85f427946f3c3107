#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erfusion/corpus.hpp"
#include "erfusion/index.hpp"
#include "erfusion/retrieval.hpp"
#include "erfusion/tokenizer.hpp"

namespace erfusion {

/// A chain query: n entity sub-queries linked by n - 1 relationship
/// sub-queries, relationship i connecting entity i and entity i + 1.
struct ERQuery {
    std::string query_id;
    std::vector<SubQuery> entity_queries;
    std::vector<SubQuery> rel_queries;

    std::size_t arity() const { return entity_queries.size(); }

    friend bool operator==(const ERQuery&, const ERQuery&) = default;
};

enum class FusionMode {
    shifted,  // candidate score minus the minimum score of its list
    raw,      // candidate score as returned by the retrieval model
};

/// Whether (a, b) and (b, a) name the same relationship.
enum class PairMatch { unordered, ordered };

struct FusionParams {
    std::size_t candidates = 20000;  // per sub-query cutoff
    std::size_t top_m = 100;
    FusionMode mode = FusionMode::shifted;
    PairMatch pair_match = PairMatch::unordered;

    void validate() const;
};

struct ScoredTuple {
    std::vector<EntityId> entities;
    double score = 0.0;
    std::string tuple_id;  // entity ids joined by '|'

    friend bool operator==(const ScoredTuple&, const ScoredTuple&) = default;
};

std::string make_tuple_id(std::span<const EntityId> entities);

/// Orders by score descending, then tuple id ascending.
bool tuple_before(const ScoredTuple& a, const ScoredTuple& b);

/// Parses the JSON Lines query format and tokenizes every sub-query.
std::vector<ERQuery> parse_queries(std::istream& in, const Tokenizer& tokenizer = {});

/// Joins relationship candidates into entity chains and scores each chain as
/// the sum of its relationship scores plus the scores of those entities that
/// are themselves candidates of their entity sub-query.
///
/// entity_candidates[i] belongs to entity sub-query i; rel_candidates[i] to
/// the relationship between entity i and entity i + 1. A chain is admissible
/// only if every adjacent pair is a relationship candidate.
std::vector<ScoredTuple> fuse(std::span<const std::vector<Candidate>> entity_candidates,
                              std::span<const std::vector<Candidate>> rel_candidates,
                              const FusionParams& params);

/// Two-stage retrieval: candidate search for every sub-query, then fuse.
std::vector<ScoredTuple> answer_query(const ERQuery& q, const Index& entity_index,
                                      const Index& rel_index, const ModelParams& model,
                                      const FusionParams& params);

struct QueryResult {
    std::string query_id;
    std::vector<ScoredTuple> tuples;
};

/// TREC run format: "query_id Q0 tuple_id rank score tag".
void write_run(std::span<const QueryResult> results, std::string_view tag, std::ostream& out);

}  // namespace erfusion
