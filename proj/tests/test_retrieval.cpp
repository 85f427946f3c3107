#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "erfusion/error.hpp"
#include "erfusion/retrieval.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"

using namespace erfusion;

namespace {

using Terms = std::vector<std::string>;

MetaDocument meta_doc(const char* entity, std::vector<std::pair<std::string, std::uint64_t>> tf) {
    std::uint64_t length = 0;
    for (const auto& [_, c] : tf) {
        length += c;
    }
    return MetaDocument{MetaKey(EntityId(entity)), std::move(tf), length, {"d"}};
}

CollectionStats stats_with(std::uint64_t total, std::uint64_t docs, double avg_len,
                           StringMap<TermStats> terms) {
    CollectionStats s;
    s.total_terms = total;
    s.num_meta_docs = docs;
    s.avg_len = avg_len;
    s.terms = std::move(terms);
    return s;
}

Index entity_index(std::vector<MetaDocument> docs) {
    return Index(IndexKind::entity, PairCanon::unordered, std::move(docs));
}

}  // namespace

TEST_CASE("Dirichlet language model worked values") {
    // Document of length 10 containing t twice; t occurs 5 times in 100 collection terms.
    auto doc = meta_doc("e", {{"t", 2}, {"x", 8}});
    auto stats = stats_with(100, 4, 25.0, {{"t", {5, 2}}, {"x", {95, 4}}});
    const Terms t{"t"};
    CHECK(score_lm(doc, t, stats, 10.0) == doctest::Approx(-2.079442).epsilon(1e-6));

    auto without = meta_doc("e", {{"x", 10}});
    CHECK(score_lm(without, t, stats, 10.0) == doctest::Approx(-3.688879).epsilon(1e-6));

    CHECK(score_lm(doc, Terms{"never"}, stats, 10.0) == 0.0);
    CHECK(score_lm(doc, Terms{"t", "t"}, stats, 10.0) == doctest::Approx(2 * std::log(0.125)));
    CHECK_THROWS_AS(score_lm(doc, t, stats, 0.0), ParameterError);
    CHECK_THROWS_AS(score_lm(doc, t, stats_with(0, 0, 0, {}), 10.0), ParameterError);
}

TEST_CASE("language model approaches the collection model as mu grows") {
    auto index = entity_index({meta_doc("a", {{"x", 3}, {"y", 1}}), meta_doc("b", {{"x", 1}, {"z", 5}}),
                               meta_doc("c", {{"y", 2}})});
    const auto& stats = index.stats();
    for (const auto& doc : index.meta_docs()) {
        for (const char* term : {"x", "y", "z"}) {
            const double limit = std::log(static_cast<double>(stats.coll_tf(term)) /
                                          static_cast<double>(stats.total_terms));
            const double got = score_lm(doc, Terms{term}, stats, 1e9);
            CHECK(std::abs(got - limit) <= 1e-6 * std::abs(limit));
        }
    }
}

TEST_CASE("BM25 worked values") {
    auto stats = stats_with(30, 3, 10.0, {{"t", {2, 1}}, {"x", {28, 3}}});
    auto doc = meta_doc("e", {{"t", 2}, {"x", 8}});
    CHECK(bm25_tf_weight(2, 10, 10.0, 1.2, 0.75) == doctest::Approx(1.375).epsilon(1e-12));
    CHECK(bm25_idf(3, 1, IdfFloor::clamp_zero) == doctest::Approx(0.510826).epsilon(1e-6));
    CHECK(score_bm25(doc, Terms{"t"}, stats, 1.2, 0.75) == doctest::Approx(0.702386).epsilon(1e-6));

    CHECK(bm25_idf(3, 3, IdfFloor::raw) == doctest::Approx(-1.945910).epsilon(1e-6));
    CHECK(bm25_idf(3, 3, IdfFloor::clamp_zero) == 0.0);
    CHECK(score_bm25(doc, Terms{"x"}, stats, 1.2, 0.75) == 0.0);
    CHECK(score_bm25(doc, Terms{"x"}, stats, 1.2, 0.75, IdfFloor::raw) < 0.0);

    auto none = meta_doc("f", {{"x", 4}});
    CHECK(score_bm25(none, Terms{"t"}, stats, 1.2, 0.75) == 0.0);
    CHECK(score_bm25(none, Terms{"unknown"}, stats, 1.2, 0.75) == 0.0);
    CHECK_THROWS_AS(score_bm25(doc, Terms{"t"}, stats, -1.0, 0.75), ParameterError);
    CHECK_THROWS_AS(score_bm25(doc, Terms{"t"}, stats, 1.2, 1.5), ParameterError);
}

TEST_CASE("BM25 term weight saturates below (k1 + 1) idf") {
    const double idf = bm25_idf(50, 3, IdfFloor::clamp_zero);
    REQUIRE(idf > 0.0);
    for (double k1 : {0.5, 1.2, 2.0}) {
        for (double b : {0.0, 0.75, 1.0}) {
            for (std::uint64_t length : {1u, 20u, 500u}) {
                double previous = -1.0;
                for (std::uint64_t tf = 0; tf <= 100; ++tf) {
                    const double w = bm25_tf_weight(tf, length, 20.0, k1, b) * idf;
                    CHECK(w < (k1 + 1.0) * idf);
                    CHECK(w >= previous);
                    previous = w;
                }
            }
        }
    }
}

TEST_CASE("BM25 length normalization") {
    auto index = entity_index({meta_doc("short", {{"t", 2}, {"x", 1}}),
                               meta_doc("long", {{"t", 2}, {"x", 20}}), meta_doc("other", {{"y", 4}}),
                               meta_doc("more", {{"y", 1}}), meta_doc("rest", {{"x", 2}})});
    const auto& stats = index.stats();
    const auto& long_doc = *index.meta(MetaKey(EntityId("long")));
    const auto& short_doc = *index.meta(MetaKey(EntityId("short")));
    CHECK(score_bm25(short_doc, Terms{"t"}, stats, 1.2, 0.75) >
          score_bm25(long_doc, Terms{"t"}, stats, 1.2, 0.75));
    CHECK(score_bm25(short_doc, Terms{"t"}, stats, 1.2, 0.0) ==
          score_bm25(long_doc, Terms{"t"}, stats, 1.2, 0.0));

    // Adding non-query terms only grows the length.
    auto grown = short_doc;
    grown.tf.emplace_back("zz", 3);
    grown.length += 3;
    CHECK(score_bm25(grown, Terms{"t"}, stats, 1.2, 0.75) <= score_bm25(short_doc, Terms{"t"}, stats, 1.2, 0.75));

    auto empty_stats = stats_with(0, 2, 0.0, {{"t", {0, 1}}});
    auto empty_doc = meta_doc("e", {});
    empty_doc.tf = {{"t", 1}};
    CHECK(std::isfinite(score_bm25(empty_doc, Terms{"t"}, empty_stats, 1.2, 0.75)));
}

TEST_CASE("model parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.mu_entity = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = {};
    p.b = 1.1;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = {};
    p.k1 = -0.1;
    CHECK_THROWS_AS(p.validate(), ParameterError);

    ModelParams automatic;
    CHECK_THROWS_AS(automatic.resolve_mu(entity_index({})), ParameterError);
    auto index = entity_index({meta_doc("a", {{"x", 3}}), meta_doc("b", {{"x", 1}})});
    CHECK(automatic.resolve_mu(index) == 2.0);
}

TEST_CASE("candidate search ordering and cutoff") {
    auto index = entity_index({meta_doc("c", {{"t", 1}}), meta_doc("a", {{"t", 1}}),
                               meta_doc("b", {{"t", 3}}), meta_doc("d", {{"v", 2}}),
                               meta_doc("e", {{"v", 1}}), meta_doc("f", {{"w", 1}}),
                               meta_doc("g", {{"w", 2}})});
    SubQuery q{{"t"}, IndexKind::entity};
    for (auto model : {Model::lm, Model::bm25}) {
        ModelParams params;
        params.model = model;
        auto all = candidate_search(index, q, params, 100);
        REQUIRE(all.size() == 3);
        CHECK(all[0].key.str() == "b");
        // a and c tie; the smaller key comes first.
        CHECK(all[1].score == all[2].score);
        CHECK(all[1].key.str() == "a");
        CHECK(all[2].key.str() == "c");

        auto top = candidate_search(index, q, params, 2);
        REQUIRE(top.size() == 2);
        CHECK(top[0] == all[0]);
        CHECK(top[1] == all[1]);
    }

    ModelParams params;
    CHECK(candidate_search(index, SubQuery{{"zzz"}, IndexKind::entity}, params, 10).empty());
    CHECK_THROWS_AS(candidate_search(index, q, params, 0), ParameterError);
    CHECK_THROWS_AS(candidate_search(index, SubQuery{{"t"}, IndexKind::relationship}, params, 5),
                    ParameterError);
}

TEST_CASE("candidate search equals exhaustive scoring") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 20; ++round) {
        auto docs = testing::random_corpus(rng, {});
        std::vector<EntityExtraction> es;
        for (const auto& d : docs) {
            auto e = extract_entity_contexts(d);
            es.insert(es.end(), e.begin(), e.end());
        }
        auto index = build_entity_index(es);
        if (index.stats().total_terms == 0) {
            continue;
        }
        const auto oracle_docs = testing::oracle_entity_metadocs(docs);
        const auto oracle_stats = testing::oracle_stats(oracle_docs);
        auto query = testing::random_query(rng, {}, 2, "q");
        for (auto model : {Model::lm, Model::bm25}) {
            ModelParams params;
            params.model = model;
            testing::OracleConfig config;
            config.model = model;
            const auto& sq = query.entity_queries[0];
            auto got = candidate_search(index, sq, params, 1000000);

            std::vector<Candidate> expected;
            for (const auto& [key, doc] : oracle_docs) {
                if (auto s = testing::oracle_score(doc, sq.terms, oracle_stats, config, true)) {
                    expected.push_back(Candidate{MetaKey::parse(key), *s});
                }
            }
            std::sort(expected.begin(), expected.end(), candidate_before);
            REQUIRE(got.size() == expected.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].key == expected[i].key);
                CHECK(std::abs(got[i].score - expected[i].score) <= 1e-9);
            }
        }
    }
}
