#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace erfusion {

/// Opaque entity identifier (e.g. a Wikipedia or Freebase key).
///
/// Never empty and never contains whitespace or '|', which separates the
/// members of a tuple id.
class EntityId {
  public:
    explicit EntityId(std::string id);

    static bool is_valid(std::string_view id);

    const std::string& str() const { return id_; }

    friend auto operator<=>(const EntityId&, const EntityId&) = default;
    friend bool operator==(const EntityId&, const EntityId&) = default;

  private:
    std::string id_;
};

std::ostream& operator<<(std::ostream& os, const EntityId& id);

/// A linked entity span. Offsets count Unicode scalar values in the sentence.
struct Mention {
    EntityId entity;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;

    friend bool operator==(const Mention&, const Mention&) = default;
};

struct Sentence {
    std::string text;
    std::vector<Mention> mentions;  // sorted by start, non-overlapping

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct AnnotatedDocument {
    std::string doc_id;
    std::vector<Sentence> sentences;

    friend bool operator==(const AnnotatedDocument&, const AnnotatedDocument&) = default;
};

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t codepoint_length(std::string_view text);

/// Substring [start, end) measured in Unicode scalar values. Out-of-range
/// bounds are clamped to the string.
std::string codepoint_substr(std::string_view text, std::size_t start, std::size_t end);

/// Throws ParseError if the sentence violates a Mention or Sentence invariant.
void validate_sentence(const Sentence& sentence);

/// Streaming reader for the JSON Lines corpus format.
///
/// Each call to next() parses and validates one document. Errors carry the
/// line number; invariant violations also name the doc_id and sentence index.
/// Blank lines are skipped.
class CorpusReader {
  public:
    explicit CorpusReader(std::istream& in) : in_(in) {}

    std::optional<AnnotatedDocument> next();

    std::size_t line_number() const { return line_no_; }

  private:
    std::istream& in_;
    std::size_t line_no_ = 0;
    std::unordered_set<std::string> seen_;
};

std::vector<AnnotatedDocument> parse_corpus(std::istream& in);

/// Writes one document as a single JSON line (no trailing newline).
void write_document(std::ostream& out, const AnnotatedDocument& doc);

void write_corpus(std::ostream& out, const std::vector<AnnotatedDocument>& docs);

}  // namespace erfusion

template <>
struct std::hash<erfusion::EntityId> {
    std::size_t operator()(const erfusion::EntityId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
