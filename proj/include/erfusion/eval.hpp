#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "erfusion/fusion.hpp"

namespace erfusion {

struct Qrel {
    std::string query_id;
    std::string tuple_id;
    int relevance = 0;
};

/// query_id -> tuple_id -> relevance
using Qrels = std::map<std::string, std::map<std::string, int>>;

struct RunEntry {
    std::string query_id;
    std::string tuple_id;
    std::size_t rank = 0;
    double score = 0.0;
};

/// query_id -> entries sorted by rank
using Run = std::map<std::string, std::vector<RunEntry>>;

/// Under unordered matching a chain and its reverse are the same answer; the
/// canonical id is the lexicographically smaller of the two readings.
std::string canonical_tuple_id(std::string_view tuple_id, PairMatch pair_match);

/// "query_id 0 tuple_id relevance" lines. Duplicate (query, tuple) pairs,
/// including ones that only collide after canonicalization, are errors.
Qrels load_qrels(std::istream& in, PairMatch pair_match = PairMatch::unordered);

/// TREC run lines. Ranks must be contiguous from 1 per query and scores
/// non-increasing with rank. Under unordered matching, an entry whose
/// canonical id already appeared at a better rank is dropped and the
/// remaining entries are re-ranked.
Run load_run(std::istream& in, PairMatch pair_match = PairMatch::unordered);

struct QueryMetrics {
    double ap = 0.0;
    double p10 = 0.0;
    double ndcg10 = 0.0;
    double rr = 0.0;
};

struct EvalReport {
    std::map<std::string, QueryMetrics> per_query;
    QueryMetrics mean;
};

QueryMetrics evaluate_query(const std::vector<RunEntry>& ranked,
                            const std::map<std::string, int>& judgments, std::size_t cutoff = 100);

/// Metrics for every query in the run or the qrels. Throws ParseError when
/// the run contains queries that have no judgments at all.
EvalReport evaluate(const Run& run, const Qrels& qrels, std::size_t cutoff = 100);

/// Tab-separated table with one row per query and a final "all" row.
void write_report(const EvalReport& report, std::ostream& out);

}  // namespace erfusion
