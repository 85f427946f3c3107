#pragma once

#include <string>
#include <utility>
#include <vector>

#include "erfusion/corpus.hpp"
#include "erfusion/tokenizer.hpp"

namespace erfusion {

/// One sentence-level context of an entity.
struct EntityExtraction {
    EntityId entity;
    std::string doc_id;
    std::vector<std::string> terms;

    friend bool operator==(const EntityExtraction&, const EntityExtraction&) = default;
};

/// One sentence-level context of a co-mentioned entity pair. The pair is in
/// order of first appearance in the sentence.
struct RelationshipExtraction {
    std::pair<EntityId, EntityId> pair;
    std::string doc_id;
    std::vector<std::string> terms;

    friend bool operator==(const RelationshipExtraction&, const RelationshipExtraction&) = default;
};

enum class ContextMode {
    separating_string,  // text strictly between the two first mentions
    sentence,           // the full sentence
};

/// One extraction per (sentence, distinct entity mentioned in it); terms are
/// the tokenized full sentence.
std::vector<EntityExtraction> extract_entity_contexts(const AnnotatedDocument& doc,
                                                      const Tokenizer& tokenizer = {});

/// One extraction per unordered pair of distinct entities co-mentioned in a
/// sentence. Each entity's first mention in the sentence fixes its position.
/// Empty separating strings are kept.
std::vector<RelationshipExtraction> extract_relationship_contexts(
    const AnnotatedDocument& doc, ContextMode mode = ContextMode::separating_string,
    const Tokenizer& tokenizer = {});

}  // namespace erfusion
