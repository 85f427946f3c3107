#include "erfusion/extract.hpp"

#include <algorithm>

namespace erfusion {

namespace {

// Each distinct entity of the sentence with its first mention, in order of
// appearance.
std::vector<const Mention*> first_mentions(const Sentence& sentence) {
    std::vector<const Mention*> firsts;
    for (const auto& mention : sentence.mentions) {
        auto seen = std::any_of(firsts.begin(), firsts.end(), [&](const Mention* m) {
            return m->entity == mention.entity;
        });
        if (!seen) {
            firsts.push_back(&mention);
        }
    }
    return firsts;
}

}  // namespace

std::vector<EntityExtraction> extract_entity_contexts(const AnnotatedDocument& doc,
                                                      const Tokenizer& tokenizer) {
    std::vector<EntityExtraction> out;
    for (const auto& sentence : doc.sentences) {
        auto firsts = first_mentions(sentence);
        if (firsts.empty()) {
            continue;
        }
        auto terms = tokenizer(sentence.text);
        for (const auto* mention : firsts) {
            out.push_back(EntityExtraction{mention->entity, doc.doc_id, terms});
        }
    }
    return out;
}

std::vector<RelationshipExtraction> extract_relationship_contexts(const AnnotatedDocument& doc,
                                                                  ContextMode mode,
                                                                  const Tokenizer& tokenizer) {
    std::vector<RelationshipExtraction> out;
    for (const auto& sentence : doc.sentences) {
        auto firsts = first_mentions(sentence);
        if (firsts.size() < 2) {
            continue;
        }
        std::vector<std::string> sentence_terms;
        if (mode == ContextMode::sentence) {
            sentence_terms = tokenizer(sentence.text);
        }
        for (std::size_t i = 0; i < firsts.size(); ++i) {
            for (std::size_t j = i + 1; j < firsts.size(); ++j) {
                const Mention& earlier = *firsts[i];
                const Mention& later = *firsts[j];
                std::vector<std::string> terms;
                if (mode == ContextMode::sentence) {
                    terms = sentence_terms;
                } else if (earlier.end < later.start) {
                    terms = tokenizer(codepoint_substr(sentence.text, earlier.end, later.start));
                }
                out.push_back(RelationshipExtraction{
                    {earlier.entity, later.entity}, doc.doc_id, std::move(terms)});
            }
        }
    }
    return out;
}

}  // namespace erfusion
