#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "erfusion/cli.hpp"
#include "erfusion/corpus.hpp"
#include "erfusion/fusion.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"

using namespace erfusion;
namespace fs = std::filesystem;

namespace {

const fs::path kToy = fs::path(ERF_DATA_DIR) / "toy";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<AnnotatedDocument> toy_corpus() {
    std::ifstream in(kToy / "corpus.jsonl");
    return parse_corpus(in);
}

std::vector<ERQuery> toy_queries() {
    std::ifstream in(kToy / "queries.jsonl");
    return parse_queries(in);
}

}  // namespace

TEST_CASE("default search on the toy corpus reproduces the golden run") {
    const auto dir = fs::temp_directory_path() / ("erfusion-toy-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    std::ostringstream out, err;
    REQUIRE(cli::run({"erfusion", "build", "--entity-corpus", (kToy / "corpus.jsonl").string(), "--out",
                      dir.string()},
                     out, err) == 0);
    std::ostringstream run;
    REQUIRE(cli::run({"erfusion", "search", "--index", dir.string(), "--queries",
                      (kToy / "queries.jsonl").string(), "--out", "-"},
                     run, err) == 0);
    fs::remove_all(dir);
    const auto golden = slurp(kToy / "golden_run.txt");
    REQUIRE(!golden.empty());
    CHECK(run.str() == golden);
}

TEST_CASE("the golden run is what the oracle produces") {
    const auto docs = toy_corpus();
    testing::OracleConfig config;
    config.top_m = 100;
    std::ostringstream expected;
    std::ifstream in(kToy / "queries.jsonl");
    std::string line;
    while (std::getline(in, line)) {
        auto record = nlohmann::json::parse(line);
        ERQuery q;
        q.query_id = record["query_id"];
        for (const auto& t : record["entities"]) {
            q.entity_queries.push_back(SubQuery{testing::ascii_tokens(t), IndexKind::entity});
        }
        for (const auto& t : record["relationships"]) {
            q.rel_queries.push_back(SubQuery{testing::ascii_tokens(t), IndexKind::relationship});
        }
        std::size_t rank = 1;
        char buf[64];
        for (const auto& t : testing::oracle_rank(docs, q, config)) {
            std::snprintf(buf, sizeof buf, "%.6f", t.score);
            expected << q.query_id << " Q0 " << t.tuple_id << ' ' << rank++ << ' ' << buf << " erfusion\n";
        }
    }
    CHECK(expected.str() == slurp(kToy / "golden_run.txt"));
}

TEST_CASE("a small candidate cutoff returns a subset of the large-cutoff tuples") {
    // Raw fusion. Relationship evidence is identical for a shared tuple; the
    // scores differ exactly by the entity candidates that only the larger
    // cutoff admits.
    const auto indexes = testing::build_indexes(toy_corpus());
    ModelParams model;
    for (const auto& q : toy_queries()) {
        FusionParams small, large;
        small.mode = large.mode = FusionMode::raw;
        small.top_m = large.top_m = 1000000;
        small.candidates = 1;
        large.candidates = 10000;
        auto few = answer_query(q, indexes.entity, indexes.relationship, model, small);
        auto many = answer_query(q, indexes.entity, indexes.relationship, model, large);

        std::map<std::string, double> many_scores;
        for (const auto& t : many) {
            many_scores[t.tuple_id] = t.score;
        }
        for (const auto& t : few) {
            REQUIRE(many_scores.contains(t.tuple_id));
            double extra = 0.0;
            for (std::size_t i = 0; i < q.arity(); ++i) {
                auto top1 = candidate_search(indexes.entity, q.entity_queries[i], model, 1);
                auto all = candidate_search(indexes.entity, q.entity_queries[i], model, 10000);
                const MetaKey key(t.entities[i]);
                bool in_small = !top1.empty() && top1[0].key == key;
                if (!in_small) {
                    for (const auto& c : all) {
                        if (c.key == key) {
                            extra += c.score;
                        }
                    }
                }
            }
            CHECK(many_scores.at(t.tuple_id) == doctest::Approx(t.score + extra).epsilon(1e-12));
        }
    }
}
