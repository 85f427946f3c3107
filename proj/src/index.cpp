#include "erfusion/index.hpp"

#include <algorithm>

#include "erfusion/error.hpp"

namespace erfusion {

namespace {

// Association weight w(key, D_j) of a raw document that contributed at least
// one context to the key. Binary: presence counts once, absence never reaches
// here.
std::uint64_t document_weight(const MetaKey&, const std::string& /*doc_id*/) { return 1; }

}  // namespace

std::string_view to_string(IndexKind kind) {
    return kind == IndexKind::entity ? "entity" : "relationship";
}

std::string_view to_string(PairCanon canon) {
    return canon == PairCanon::unordered ? "unordered" : "ordered";
}

MetaKey::MetaKey(EntityId entity) { parts_.push_back(std::move(entity)); }

MetaKey::MetaKey(EntityId first, EntityId second) {
    if (first == second) {
        throw ParseError("pair key needs two distinct entities, got \"" + first.str() + "\" twice");
    }
    parts_.push_back(std::move(first));
    parts_.push_back(std::move(second));
}

MetaKey MetaKey::parse(std::string_view text) {
    auto bar = text.find('|');
    if (bar == std::string_view::npos) {
        return MetaKey(EntityId(std::string(text)));
    }
    if (text.find('|', bar + 1) != std::string_view::npos) {
        throw ParseError("meta-document key has more than two entities: \"" + std::string(text) + "\"");
    }
    return MetaKey(EntityId(std::string(text.substr(0, bar))),
                   EntityId(std::string(text.substr(bar + 1))));
}

std::string MetaKey::str() const {
    std::string out = parts_.front().str();
    for (std::size_t i = 1; i < parts_.size(); ++i) {
        out += '|';
        out += parts_[i].str();
    }
    return out;
}

MetaKey make_pair_key(const EntityId& first, const EntityId& second, PairCanon canon) {
    if (canon == PairCanon::unordered && second < first) {
        return MetaKey(second, first);
    }
    return MetaKey(first, second);
}

std::uint64_t MetaDocument::term_freq(std::string_view term) const {
    auto it = std::lower_bound(tf.begin(), tf.end(), term,
                               [](const auto& entry, std::string_view t) { return entry.first < t; });
    if (it != tf.end() && it->first == term) {
        return it->second;
    }
    return 0;
}

std::uint64_t CollectionStats::coll_tf(std::string_view term) const {
    auto it = terms.find(term);
    return it == terms.end() ? 0 : it->second.coll_tf;
}

std::uint64_t CollectionStats::doc_freq(std::string_view term) const {
    auto it = terms.find(term);
    return it == terms.end() ? 0 : it->second.doc_freq;
}

CollectionStats CollectionStats::from_meta_docs(std::span<const MetaDocument> docs) {
    CollectionStats stats;
    stats.num_meta_docs = docs.size();
    for (const auto& doc : docs) {
        for (const auto& [term, count] : doc.tf) {
            auto& entry = stats.terms[term];
            entry.coll_tf += count;
            entry.doc_freq += 1;
            stats.total_terms += count;
        }
    }
    if (stats.num_meta_docs > 0) {
        stats.avg_len =
            static_cast<double>(stats.total_terms) / static_cast<double>(stats.num_meta_docs);
    }
    return stats;
}

Index::Index(IndexKind kind, PairCanon pair_canon, std::vector<MetaDocument> docs,
             std::vector<std::string> stopwords)
    : kind_(kind), pair_canon_(pair_canon), docs_(std::move(docs)),
      stopwords_(std::move(stopwords)) {
    std::sort(docs_.begin(), docs_.end(),
              [](const MetaDocument& a, const MetaDocument& b) { return a.key < b.key; });
    std::sort(stopwords_.begin(), stopwords_.end());
    stopwords_.erase(std::unique(stopwords_.begin(), stopwords_.end()), stopwords_.end());
    const std::size_t arity = kind_ == IndexKind::entity ? 1 : 2;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (docs_[i].key.arity() != arity) {
            throw IndexFormatError("meta-document key \"" + docs_[i].key.str() +
                                   "\" does not match index kind " + std::string(to_string(kind_)));
        }
        if (i > 0 && docs_[i - 1].key == docs_[i].key) {
            throw IndexFormatError("duplicate meta-document key \"" + docs_[i].key.str() + "\"");
        }
        for (const auto& entry : docs_[i].tf) {
            postings_[entry.first].push_back(static_cast<std::uint32_t>(i));
        }
    }
    stats_ = CollectionStats::from_meta_docs(docs_);
}

TermLookup Index::lookup(std::string_view term) const {
    TermLookup result;
    auto it = stats_.terms.find(term);
    if (it == stats_.terms.end()) {
        return result;
    }
    result.coll_tf = it->second.coll_tf;
    result.doc_freq = it->second.doc_freq;
    for (auto pos : postings(term)) {
        result.keys.push_back(docs_[pos].key);
    }
    return result;
}

const MetaDocument* Index::meta(const MetaKey& key) const {
    auto it = std::lower_bound(docs_.begin(), docs_.end(), key,
                               [](const MetaDocument& d, const MetaKey& k) { return d.key < k; });
    if (it != docs_.end() && it->key == key) {
        return &*it;
    }
    return nullptr;
}

std::span<const std::uint32_t> Index::postings(std::string_view term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) {
        return {};
    }
    return it->second;
}

bool operator==(const Index& a, const Index& b) {
    return a.kind_ == b.kind_ && a.pair_canon_ == b.pair_canon_ && a.docs_ == b.docs_ &&
           a.stats_ == b.stats_ && a.stopwords_ == b.stopwords_;
}

IndexBuilder::IndexBuilder(IndexKind kind, PairCanon pair_canon)
    : kind_(kind), pair_canon_(pair_canon) {}

void IndexBuilder::add_context(MetaKey key, const std::string& doc_id,
                               std::span<const std::string> terms) {
    auto& counts = contexts_[std::move(key)][doc_id];
    for (const auto& term : terms) {
        ++counts[term];
    }
}

void IndexBuilder::add(const EntityExtraction& extraction) {
    if (kind_ != IndexKind::entity) {
        throw Error("entity extraction added to a relationship index builder");
    }
    add_context(MetaKey(extraction.entity), extraction.doc_id, extraction.terms);
}

void IndexBuilder::add(const RelationshipExtraction& extraction) {
    if (kind_ != IndexKind::relationship) {
        throw Error("relationship extraction added to an entity index builder");
    }
    add_context(make_pair_key(extraction.pair.first, extraction.pair.second, pair_canon_),
                extraction.doc_id, extraction.terms);
}

void IndexBuilder::merge(IndexBuilder&& other) {
    for (auto& [key, per_doc] : other.contexts_) {
        auto& mine = contexts_[key];
        for (auto& [doc_id, counts] : per_doc) {
            auto& target = mine[doc_id];
            for (auto& [term, count] : counts) {
                target[term] += count;
            }
        }
    }
    other.contexts_.clear();
}

Index IndexBuilder::finish(std::vector<std::string> stopwords) && {
    std::vector<MetaDocument> docs;
    docs.reserve(contexts_.size());
    for (auto& [key, per_doc] : contexts_) {
        StringMap<std::uint64_t> tf;
        MetaDocument doc{key, {}, 0, {}};
        for (auto& [doc_id, counts] : per_doc) {
            const auto weight = document_weight(key, doc_id);
            for (auto& [term, count] : counts) {
                tf[term] += count * weight;
            }
            doc.doc_ids.push_back(doc_id);
        }
        doc.tf.reserve(tf.size());
        for (auto& [term, count] : tf) {
            if (count > 0) {
                doc.tf.emplace_back(term, count);
                doc.length += count;
            }
        }
        std::sort(doc.tf.begin(), doc.tf.end());
        docs.push_back(std::move(doc));
    }
    contexts_.clear();
    return Index(kind_, pair_canon_, std::move(docs), std::move(stopwords));
}

Index build_entity_index(std::span<const EntityExtraction> extractions) {
    IndexBuilder builder(IndexKind::entity);
    for (const auto& e : extractions) {
        builder.add(e);
    }
    return std::move(builder).finish();
}

Index build_relationship_index(std::span<const RelationshipExtraction> extractions,
                               PairCanon pair_canon) {
    IndexBuilder builder(IndexKind::relationship, pair_canon);
    for (const auto& e : extractions) {
        builder.add(e);
    }
    return std::move(builder).finish();
}

}  // namespace erfusion
