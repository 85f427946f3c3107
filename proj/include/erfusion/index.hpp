#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "erfusion/corpus.hpp"
#include "erfusion/extract.hpp"

namespace erfusion {

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

enum class IndexKind { entity, relationship };

/// How relationship pairs are keyed. Unordered keys sort the two ids.
enum class PairCanon { unordered, ordered };

std::string_view to_string(IndexKind kind);
std::string_view to_string(PairCanon canon);

/// Key of a meta-document: a single entity or an entity pair.
///
/// Keys order lexicographically by their entity ids, element by element.
/// The text form joins the ids with '|'.
class MetaKey {
  public:
    explicit MetaKey(EntityId entity);
    MetaKey(EntityId first, EntityId second);

    /// Parses the '|'-joined text form.
    static MetaKey parse(std::string_view text);

    std::size_t arity() const { return parts_.size(); }
    const EntityId& operator[](std::size_t i) const { return parts_[i]; }
    const std::vector<EntityId>& parts() const { return parts_; }

    std::string str() const;

    friend auto operator<=>(const MetaKey&, const MetaKey&) = default;
    friend bool operator==(const MetaKey&, const MetaKey&) = default;

  private:
    std::vector<EntityId> parts_;
};

/// Pair key under the given canonicalization.
MetaKey make_pair_key(const EntityId& first, const EntityId& second, PairCanon canon);

/// Aggregated contexts of one entity or entity pair.
struct MetaDocument {
    MetaKey key;
    std::vector<std::pair<std::string, std::uint64_t>> tf;  // sorted by term, counts >= 1
    std::uint64_t length = 0;                                // sum of tf
    std::vector<std::string> doc_ids;                        // sorted, unique

    /// Pseudo-frequency of a term, 0 when absent.
    std::uint64_t term_freq(std::string_view term) const;

    friend bool operator==(const MetaDocument&, const MetaDocument&) = default;
};

struct TermStats {
    std::uint64_t coll_tf = 0;   // f(t, C)
    std::uint64_t doc_freq = 0;  // n(t)

    friend bool operator==(const TermStats&, const TermStats&) = default;
};

struct CollectionStats {
    std::uint64_t total_terms = 0;
    std::uint64_t num_meta_docs = 0;
    double avg_len = 0.0;
    StringMap<TermStats> terms;

    std::uint64_t coll_tf(std::string_view term) const;
    std::uint64_t doc_freq(std::string_view term) const;

    /// Recomputes every statistic from the meta-documents.
    static CollectionStats from_meta_docs(std::span<const MetaDocument> docs);

    friend bool operator==(const CollectionStats&, const CollectionStats&) = default;
};

struct TermLookup {
    std::uint64_t coll_tf = 0;
    std::uint64_t doc_freq = 0;
    std::vector<MetaKey> keys;
};

/// Immutable inverted index over meta-documents.
///
/// Meta-documents are stored sorted by key; postings hold positions into that
/// order, so each posting list is sorted by key as well.
class Index {
  public:
    Index() = default;
    Index(IndexKind kind, PairCanon pair_canon, std::vector<MetaDocument> docs,
          std::vector<std::string> stopwords = {});

    IndexKind kind() const { return kind_; }
    PairCanon pair_canon() const { return pair_canon_; }
    const CollectionStats& stats() const { return stats_; }
    std::span<const MetaDocument> meta_docs() const { return docs_; }

    /// Stopwords the index was tokenized with. Queries must use the same list.
    const std::vector<std::string>& stopwords() const { return stopwords_; }

    TermLookup lookup(std::string_view term) const;

    /// nullptr when no meta-document has this key.
    const MetaDocument* meta(const MetaKey& key) const;

    /// Positions (into meta_docs()) of the meta-documents containing term.
    std::span<const std::uint32_t> postings(std::string_view term) const;

    friend bool operator==(const Index& a, const Index& b);

  private:
    IndexKind kind_ = IndexKind::entity;
    PairCanon pair_canon_ = PairCanon::unordered;
    std::vector<MetaDocument> docs_;
    CollectionStats stats_;
    StringMap<std::vector<std::uint32_t>> postings_;
    std::vector<std::string> stopwords_;
};

/// Accumulates extraction contexts into meta-documents.
///
/// Counts are kept per (key, raw document) and combined with the binary
/// document association weight when the index is finalized. Builders over
/// disjoint inputs can be merged in any order with identical results.
class IndexBuilder {
  public:
    IndexBuilder(IndexKind kind, PairCanon pair_canon = PairCanon::unordered);

    void add(const EntityExtraction& extraction);
    void add(const RelationshipExtraction& extraction);
    void merge(IndexBuilder&& other);

    Index finish(std::vector<std::string> stopwords = {}) &&;

  private:
    using TermCounts = StringMap<std::uint64_t>;

    void add_context(MetaKey key, const std::string& doc_id, std::span<const std::string> terms);

    IndexKind kind_;
    PairCanon pair_canon_;
    std::map<MetaKey, std::map<std::string, TermCounts>> contexts_;
};

Index build_entity_index(std::span<const EntityExtraction> extractions);
Index build_relationship_index(std::span<const RelationshipExtraction> extractions,
                               PairCanon pair_canon = PairCanon::unordered);

inline constexpr int kIndexFormatVersion = 1;

/// Writes meta.json, metadocs.jsonl and dict.tsv into dir (created if needed).
/// Output is canonical: the same index always yields the same bytes.
void save_index(const Index& index, const std::filesystem::path& dir);

/// Loads and cross-checks an index directory written by save_index.
Index load_index(const std::filesystem::path& dir);

}  // namespace erfusion
