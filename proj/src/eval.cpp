#include "erfusion/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "erfusion/error.hpp"

namespace erfusion {

namespace {

std::vector<std::string_view> split_bar(std::string_view id) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    for (;;) {
        auto bar = id.find('|', begin);
        parts.push_back(id.substr(begin, bar - begin));
        if (bar == std::string_view::npos) {
            return parts;
        }
        begin = bar + 1;
    }
}

std::string join_bar(const std::vector<std::string_view>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += '|';
        }
        out += parts[i];
    }
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> fields;
    std::string f;
    while (in >> f) {
        fields.push_back(std::move(f));
    }
    return fields;
}

template <typename T>
bool parse_number(const std::string& text, T& value) {
    std::istringstream in(text);
    in >> value;
    return in && in.eof();
}

}  // namespace

std::string canonical_tuple_id(std::string_view tuple_id, PairMatch pair_match) {
    if (pair_match == PairMatch::ordered) {
        return std::string(tuple_id);
    }
    auto forward = split_bar(tuple_id);
    auto backward = forward;
    std::reverse(backward.begin(), backward.end());
    return std::min(forward, backward) == forward ? join_bar(forward) : join_bar(backward);
}

Qrels load_qrels(std::istream& in, PairMatch pair_match) {
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = fields_of(line);
        if (fields.empty()) {
            continue;
        }
        int relevance = 0;
        if (fields.size() != 4 || !parse_number(fields[3], relevance) || relevance < 0) {
            throw ParseError("qrels line " + std::to_string(line_no) +
                             ": expected \"query_id 0 tuple_id relevance\" with relevance >= 0");
        }
        auto tuple = canonical_tuple_id(fields[2], pair_match);
        if (!qrels[fields[0]].emplace(tuple, relevance).second) {
            throw ParseError("qrels line " + std::to_string(line_no) + ": duplicate judgment for " +
                             fields[0] + " " + tuple);
        }
    }
    return qrels;
}

Run load_run(std::istream& in, PairMatch pair_match) {
    Run run;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = fields_of(line);
        if (fields.empty()) {
            continue;
        }
        RunEntry entry;
        if (fields.size() != 6 || !parse_number(fields[3], entry.rank) || entry.rank < 1 ||
            !parse_number(fields[4], entry.score)) {
            throw ParseError("run line " + std::to_string(line_no) +
                             ": expected \"query_id Q0 tuple_id rank score tag\"");
        }
        entry.query_id = fields[0];
        entry.tuple_id = fields[2];
        run[entry.query_id].push_back(std::move(entry));
    }

    for (auto& [query_id, entries] : run) {
        std::sort(entries.begin(), entries.end(),
                  [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].rank != i + 1) {
                throw ParseError("run: ranks of query " + query_id +
                                 " are not contiguous from 1 (found rank " +
                                 std::to_string(entries[i].rank) + " at position " +
                                 std::to_string(i + 1) + ")");
            }
            if (i > 0 && entries[i].score > entries[i - 1].score) {
                throw ParseError("run: score increases at rank " + std::to_string(i + 1) +
                                 " of query " + query_id);
            }
        }

        std::unordered_set<std::string> seen;
        std::vector<RunEntry> kept;
        for (auto& e : entries) {
            e.tuple_id = canonical_tuple_id(e.tuple_id, pair_match);
            if (seen.insert(e.tuple_id).second) {
                e.rank = kept.size() + 1;
                kept.push_back(std::move(e));
            }
        }
        entries = std::move(kept);
    }
    return run;
}

QueryMetrics evaluate_query(const std::vector<RunEntry>& ranked,
                            const std::map<std::string, int>& judgments, std::size_t cutoff) {
    auto relevance_of = [&](const std::string& tuple) {
        auto it = judgments.find(tuple);
        return it == judgments.end() ? 0 : it->second;
    };

    std::vector<int> ideal;
    for (const auto& [_, rel] : judgments) {
        if (rel > 0) {
            ideal.push_back(rel);
        }
    }
    std::sort(ideal.rbegin(), ideal.rend());
    const auto total_relevant = ideal.size();

    QueryMetrics m;
    std::size_t hits = 0;
    double precision_sum = 0.0;
    double dcg = 0.0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto rank = i + 1;
        const int rel = relevance_of(ranked[i].tuple_id);
        if (rel <= 0) {
            continue;
        }
        ++hits;
        if (rank <= cutoff) {
            precision_sum += static_cast<double>(hits) / static_cast<double>(rank);
        }
        if (rank <= 10) {
            m.p10 += 1.0;
            dcg += rel / std::log2(static_cast<double>(rank) + 1.0);
        }
        if (m.rr == 0.0) {
            m.rr = 1.0 / static_cast<double>(rank);
        }
    }
    m.p10 /= 10.0;
    if (total_relevant > 0) {
        m.ap = precision_sum / static_cast<double>(total_relevant);
    }
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(10, ideal.size()); ++i) {
        idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    if (idcg > 0.0) {
        m.ndcg10 = dcg / idcg;
    }
    return m;
}

EvalReport evaluate(const Run& run, const Qrels& qrels, std::size_t cutoff) {
    std::vector<std::string> unjudged;
    for (const auto& [query_id, _] : run) {
        if (!qrels.contains(query_id)) {
            unjudged.push_back(query_id);
        }
    }
    if (!unjudged.empty()) {
        std::string list;
        for (const auto& q : unjudged) {
            list += (list.empty() ? "" : ", ") + q;
        }
        throw ParseError("run contains queries without relevance judgments: " + list);
    }

    EvalReport report;
    static const std::vector<RunEntry> empty_run;
    for (const auto& [query_id, judgments] : qrels) {
        auto it = run.find(query_id);
        report.per_query[query_id] =
            evaluate_query(it == run.end() ? empty_run : it->second, judgments, cutoff);
    }
    if (!report.per_query.empty()) {
        const double count = static_cast<double>(report.per_query.size());
        for (const auto& [_, m] : report.per_query) {
            report.mean.ap += m.ap;
            report.mean.p10 += m.p10;
            report.mean.ndcg10 += m.ndcg10;
            report.mean.rr += m.rr;
        }
        report.mean.ap /= count;
        report.mean.p10 /= count;
        report.mean.ndcg10 /= count;
        report.mean.rr /= count;
    }
    return report;
}

void write_report(const EvalReport& report, std::ostream& out) {
    auto row = [&](const std::string& name, const QueryMetrics& m) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "\t%.4f\t%.4f\t%.4f\t%.4f\n", m.ap, m.p10, m.ndcg10, m.rr);
        out << name << buf;
    };
    out << "query\tMAP\tP@10\tNDCG@10\tMRR\n";
    for (const auto& [query_id, m] : report.per_query) {
        row(query_id, m);
    }
    row("all", report.mean);
}

}  // namespace erfusion
