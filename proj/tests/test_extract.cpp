#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "erfusion/extract.hpp"
#include "synthetic.hpp"

using namespace erfusion;

namespace {

Mention mention(const char* entity, std::size_t start, std::size_t end, const std::string& text) {
    return Mention{EntityId(entity), start, end, text.substr(start, end - start)};
}

AnnotatedDocument intel_doc() {
    const std::string text = "Intel was founded by Gordon Moore";
    return AnnotatedDocument{
        "d1", {Sentence{text, {mention("intel", 0, 5, text), mention("gordon_moore", 21, 33, text)}}}};
}

using Terms = std::vector<std::string>;

bool is_subsequence(const Terms& small, const Terms& big) {
    std::size_t i = 0;
    for (const auto& t : big) {
        if (i < small.size() && small[i] == t) {
            ++i;
        }
    }
    return i == small.size();
}

}  // namespace

TEST_CASE("entity contexts are the full sentence, one per distinct entity") {
    auto out = extract_entity_contexts(intel_doc());
    REQUIRE(out.size() == 2);
    const Terms sentence{"intel", "was", "founded", "by", "gordon", "moore"};
    CHECK(out[0].entity == EntityId("intel"));
    CHECK(out[0].terms == sentence);
    CHECK(out[1].entity == EntityId("gordon_moore"));
    CHECK(out[1].terms == sentence);
    CHECK(out[1].doc_id == "d1");
}

TEST_CASE("sentences without mentions yield no extractions") {
    AnnotatedDocument doc{"d", {Sentence{"nothing linked here", {}}}};
    CHECK(extract_entity_contexts(doc).empty());
    CHECK(extract_relationship_contexts(doc).empty());
}

TEST_CASE("an entity mentioned twice in a sentence is extracted once") {
    const std::string text = "e1 met e1";
    AnnotatedDocument doc{"d", {Sentence{text, {mention("e1", 0, 2, text), mention("e1", 7, 9, text)}}}};
    CHECK(extract_entity_contexts(doc).size() == 1);
    CHECK(extract_relationship_contexts(doc).empty());
}

TEST_CASE("separating string lies strictly between the first mentions") {
    auto out = extract_relationship_contexts(intel_doc(), ContextMode::separating_string);
    REQUIRE(out.size() == 1);
    CHECK(out[0].pair.first == EntityId("intel"));
    CHECK(out[0].pair.second == EntityId("gordon_moore"));
    CHECK(out[0].terms == Terms{"was", "founded", "by"});

    auto full = extract_relationship_contexts(intel_doc(), ContextMode::sentence);
    REQUIRE(full.size() == 1);
    CHECK(full[0].terms == Terms{"intel", "was", "founded", "by", "gordon", "moore"});
}

TEST_CASE("first mention defines the window when an entity repeats") {
    const std::string text = "A likes B and A";
    AnnotatedDocument doc{
        "d", {Sentence{text, {mention("a", 0, 1, text), mention("b", 8, 9, text), mention("a", 14, 15, text)}}}};
    auto out = extract_relationship_contexts(doc);
    REQUIRE(out.size() == 1);
    CHECK(out[0].pair.first == EntityId("a"));
    CHECK(out[0].terms == Terms{"likes"});
}

TEST_CASE("three entities give all three pairs") {
    const std::string text = "X and Y met Z";
    AnnotatedDocument doc{
        "d", {Sentence{text, {mention("x", 0, 1, text), mention("y", 6, 7, text), mention("z", 12, 13, text)}}}};
    auto out = extract_relationship_contexts(doc);
    REQUIRE(out.size() == 3);
    CHECK(out[0].terms == Terms{"and"});
    CHECK(out[1].pair == std::pair{EntityId("x"), EntityId("z")});
    CHECK(out[1].terms == Terms{"and", "y", "met"});
    CHECK(out[2].terms == Terms{"met"});
}

TEST_CASE("adjacent mentions keep an empty context") {
    const std::string text = "AB";
    AnnotatedDocument doc{"d", {Sentence{text, {mention("a", 0, 1, text), mention("b", 1, 2, text)}}}};
    auto out = extract_relationship_contexts(doc);
    REQUIRE(out.size() == 1);
    CHECK(out[0].terms.empty());
}

TEST_CASE("extraction invariants on random corpora") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 30; ++round) {
        for (const auto& doc : testing::random_corpus(rng, {})) {
            auto entities = extract_entity_contexts(doc);
            auto seps = extract_relationship_contexts(doc, ContextMode::separating_string);
            auto fulls = extract_relationship_contexts(doc, ContextMode::sentence);
            REQUIRE(seps.size() == fulls.size());

            std::size_t expected_pairs = 0;
            for (const auto& s : doc.sentences) {
                std::set<EntityId> distinct;
                for (const auto& m : s.mentions) {
                    distinct.insert(m.entity);
                }
                expected_pairs += distinct.size() * (distinct.size() - (distinct.empty() ? 0 : 1)) / 2;
            }
            CHECK(seps.size() == expected_pairs);

            std::set<EntityId> extracted;
            for (const auto& e : entities) {
                extracted.insert(e.entity);
            }
            for (std::size_t i = 0; i < seps.size(); ++i) {
                CHECK(seps[i].pair.first != seps[i].pair.second);
                CHECK(extracted.contains(seps[i].pair.first));
                CHECK(extracted.contains(seps[i].pair.second));
                CHECK(seps[i].pair == fulls[i].pair);
                CHECK(is_subsequence(seps[i].terms, fulls[i].terms));
            }
        }
    }
}
