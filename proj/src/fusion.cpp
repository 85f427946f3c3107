#include "erfusion/fusion.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "erfusion/error.hpp"

namespace erfusion {

using json = nlohmann::json;

namespace {

struct Edge {
    EntityId next;
    double score;
};

double list_shift(const std::vector<Candidate>& list, FusionMode mode) {
    if (mode == FusionMode::raw || list.empty()) {
        return 0.0;
    }
    double low = list.front().score;
    for (const auto& c : list) {
        low = std::min(low, c.score);
    }
    return low;
}

// Adjacency for one relationship sub-query: entity -> (next entity, score).
std::unordered_map<EntityId, std::vector<Edge>> build_edges(const std::vector<Candidate>& list,
                                                            const FusionParams& params) {
    const double shift = list_shift(list, params.mode);
    const auto canon =
        params.pair_match == PairMatch::unordered ? PairCanon::unordered : PairCanon::ordered;

    // Candidates that collapse onto one key keep their best score.
    std::map<MetaKey, double> pairs;
    for (const auto& c : list) {
        if (c.key.arity() != 2) {
            throw ParameterError("relationship candidate \"" + c.key.str() + "\" is not a pair");
        }
        auto key = make_pair_key(c.key[0], c.key[1], canon);
        auto [it, inserted] = pairs.emplace(std::move(key), c.score);
        if (!inserted) {
            it->second = std::max(it->second, c.score);
        }
    }

    std::unordered_map<EntityId, std::vector<Edge>> edges;
    for (const auto& [key, score] : pairs) {
        edges[key[0]].push_back(Edge{key[1], score - shift});
        if (params.pair_match == PairMatch::unordered) {
            edges[key[1]].push_back(Edge{key[0], score - shift});
        }
    }
    return edges;
}

std::unordered_map<EntityId, double> build_entity_scores(const std::vector<Candidate>& list,
                                                         FusionMode mode) {
    const double shift = list_shift(list, mode);
    std::unordered_map<EntityId, double> scores;
    for (const auto& c : list) {
        if (c.key.arity() != 1) {
            throw ParameterError("entity candidate \"" + c.key.str() + "\" is not a single entity");
        }
        auto [it, inserted] = scores.emplace(c.key[0], c.score - shift);
        if (!inserted) {
            it->second = std::max(it->second, c.score - shift);
        }
    }
    return scores;
}

[[noreturn]] void query_error(std::size_t line, const std::string& what) {
    throw ParseError("query line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> string_array(const json& record, const char* field, std::size_t line) {
    auto it = record.find(field);
    if (it == record.end() || !it->is_array()) {
        query_error(line, std::string("field \"") + field + "\" must be an array of strings");
    }
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) {
            query_error(line, std::string("field \"") + field + "\" must be an array of strings");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

void FusionParams::validate() const {
    if (candidates < 1) {
        throw ParameterError("candidate cutoff must be >= 1");
    }
    if (top_m < 1) {
        throw ParameterError("output size must be >= 1");
    }
}

std::string make_tuple_id(std::span<const EntityId> entities) {
    std::string id;
    for (std::size_t i = 0; i < entities.size(); ++i) {
        if (i > 0) {
            id += '|';
        }
        id += entities[i].str();
    }
    return id;
}

bool tuple_before(const ScoredTuple& a, const ScoredTuple& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.tuple_id < b.tuple_id;
}

std::vector<ERQuery> parse_queries(std::istream& in, const Tokenizer& tokenizer) {
    std::vector<ERQuery> queries;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            query_error(line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object()) {
            query_error(line_no, "record must be a JSON object");
        }
        auto id = record.find("query_id");
        if (id == record.end() || !id->is_string() || id->get<std::string>().empty()) {
            query_error(line_no, "missing or empty \"query_id\"");
        }

        ERQuery q;
        q.query_id = id->get<std::string>();
        if (q.query_id.find_first_of(" \t") != std::string::npos) {
            query_error(line_no, "query_id \"" + q.query_id + "\" contains whitespace");
        }
        if (!seen.insert(q.query_id).second) {
            query_error(line_no, "duplicate query_id \"" + q.query_id + "\"");
        }
        const auto entities = string_array(record, "entities", line_no);
        const auto relationships = string_array(record, "relationships", line_no);
        if (entities.size() < 2 || relationships.size() + 1 != entities.size()) {
            query_error(line_no, "query \"" + q.query_id + "\" has " +
                                     std::to_string(entities.size()) + " entity and " +
                                     std::to_string(relationships.size()) +
                                     " relationship sub-queries; expected n >= 2 and n - 1");
        }
        auto make = [&](const std::string& text, IndexKind target) {
            SubQuery sq{tokenizer(text), target};
            if (sq.terms.empty()) {
                query_error(line_no, "query \"" + q.query_id + "\": sub-query \"" + text +
                                         "\" has no terms after tokenization");
            }
            return sq;
        };
        for (const auto& text : entities) {
            q.entity_queries.push_back(make(text, IndexKind::entity));
        }
        for (const auto& text : relationships) {
            q.rel_queries.push_back(make(text, IndexKind::relationship));
        }
        queries.push_back(std::move(q));
    }
    return queries;
}

std::vector<ScoredTuple> fuse(std::span<const std::vector<Candidate>> entity_candidates,
                              std::span<const std::vector<Candidate>> rel_candidates,
                              const FusionParams& params) {
    params.validate();
    const std::size_t n = entity_candidates.size();
    if (n < 2 || rel_candidates.size() + 1 != n) {
        throw ParameterError("fusion needs n >= 2 entity lists and n - 1 relationship lists");
    }

    std::vector<std::unordered_map<EntityId, double>> entity_scores;
    for (const auto& list : entity_candidates) {
        entity_scores.push_back(build_entity_scores(list, params.mode));
    }
    std::vector<std::unordered_map<EntityId, std::vector<Edge>>> edges;
    for (const auto& list : rel_candidates) {
        edges.push_back(build_edges(list, params));
    }

    std::vector<ScoredTuple> tuples;
    std::vector<EntityId> chain;
    std::vector<double> rel_scores;

    auto emit = [&] {
        double score = 0.0;
        for (double r : rel_scores) {
            score += r;
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto it = entity_scores[i].find(chain[i]);
            if (it != entity_scores[i].end()) {
                score += it->second;
            }
        }
        tuples.push_back(ScoredTuple{chain, score, make_tuple_id(chain)});
    };

    auto extend = [&](auto&& self, std::size_t step) -> void {
        if (step + 1 == n) {
            emit();
            return;
        }
        auto it = edges[step].find(chain.back());
        if (it == edges[step].end()) {
            return;
        }
        for (const auto& edge : it->second) {
            chain.push_back(edge.next);
            rel_scores.push_back(edge.score);
            self(self, step + 1);
            chain.pop_back();
            rel_scores.pop_back();
        }
    };

    for (const auto& [start, _] : edges.front()) {
        chain.assign(1, start);
        extend(extend, 0);
    }

    if (params.top_m < tuples.size()) {
        std::partial_sort(tuples.begin(), tuples.begin() + static_cast<std::ptrdiff_t>(params.top_m),
                          tuples.end(), tuple_before);
        tuples.resize(params.top_m);
    } else {
        std::sort(tuples.begin(), tuples.end(), tuple_before);
    }
    return tuples;
}

std::vector<ScoredTuple> answer_query(const ERQuery& q, const Index& entity_index,
                                      const Index& rel_index, const ModelParams& model,
                                      const FusionParams& params) {
    model.validate();
    params.validate();
    if (q.entity_queries.size() < 2 || q.rel_queries.size() + 1 != q.entity_queries.size()) {
        throw ParameterError("query \"" + q.query_id + "\" is not a valid chain");
    }
    std::vector<std::vector<Candidate>> entity_candidates;
    for (const auto& sq : q.entity_queries) {
        entity_candidates.push_back(candidate_search(entity_index, sq, model, params.candidates));
    }
    std::vector<std::vector<Candidate>> rel_candidates;
    for (const auto& sq : q.rel_queries) {
        rel_candidates.push_back(candidate_search(rel_index, sq, model, params.candidates));
    }
    return fuse(entity_candidates, rel_candidates, params);
}

void write_run(std::span<const QueryResult> results, std::string_view tag, std::ostream& out) {
    if (tag.empty() || tag.find_first_of(" \t\n") != std::string_view::npos) {
        throw ParameterError("run tag must be a non-empty word");
    }
    char score[64];
    for (const auto& result : results) {
        std::size_t rank = 1;
        for (const auto& tuple : result.tuples) {
            std::snprintf(score, sizeof score, "%.6f", tuple.score);
            out << result.query_id << " Q0 " << tuple.tuple_id << ' ' << rank++ << ' ' << score
                << ' ' << tag << '\n';
        }
    }
    if (!out) {
        throw IoError("failed writing run output");
    }
}

}  // namespace erfusion
