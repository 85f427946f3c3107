#include "erfusion/corpus.hpp"

#include <json.hpp>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "erfusion/error.hpp"

namespace erfusion {

using json = nlohmann::json;

namespace {

template <typename Fn>
void for_each_codepoint(std::string_view text, Fn&& fn) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t offset = 0;
    while (offset < length) {
        int32_t begin = offset;
        UChar32 c = 0;
        U8_NEXT(bytes, offset, length, c);
        fn(c, static_cast<std::size_t>(begin));
    }
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw ParseError("corpus line " + std::to_string(line) + ": " + what);
}

const json& require_field(const json& obj, const char* name, std::size_t line) {
    auto it = obj.find(name);
    if (it == obj.end()) {
        fail_line(line, std::string("missing field \"") + name + "\"");
    }
    return *it;
}

std::string require_string(const json& obj, const char* name, std::size_t line) {
    const auto& v = require_field(obj, name, line);
    if (!v.is_string()) {
        fail_line(line, std::string("field \"") + name + "\" must be a string");
    }
    return v.get<std::string>();
}

std::size_t require_offset(const json& obj, const char* name, std::size_t line) {
    const auto& v = require_field(obj, name, line);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        fail_line(line, std::string("field \"") + name + "\" must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

}  // namespace

EntityId::EntityId(std::string id) : id_(std::move(id)) {
    if (!is_valid(id_)) {
        throw ParseError("invalid entity id \"" + id_ + "\"");
    }
}

bool EntityId::is_valid(std::string_view id) {
    if (id.empty()) {
        return false;
    }
    bool ok = true;
    for_each_codepoint(id, [&](UChar32 c, std::size_t) {
        if (c < 0 || c == '|' || u_isUWhiteSpace(c) || c == '\n' || c == '\r' || c == '\t') {
            ok = false;
        }
    });
    return ok;
}

std::ostream& operator<<(std::ostream& os, const EntityId& id) { return os << id.str(); }

std::size_t codepoint_length(std::string_view text) {
    std::size_t n = 0;
    for_each_codepoint(text, [&](UChar32, std::size_t) { ++n; });
    return n;
}

std::string codepoint_substr(std::string_view text, std::size_t start, std::size_t end) {
    std::size_t index = 0;
    std::size_t byte_begin = text.size();
    std::size_t byte_end = text.size();
    for_each_codepoint(text, [&](UChar32, std::size_t at) {
        if (index == start) {
            byte_begin = at;
        }
        if (index == end) {
            byte_end = at;
        }
        ++index;
    });
    if (byte_begin >= byte_end) {
        return {};
    }
    return std::string(text.substr(byte_begin, byte_end - byte_begin));
}

void validate_sentence(const Sentence& sentence) {
    const auto length = codepoint_length(sentence.text);
    std::size_t previous_end = 0;
    for (std::size_t m = 0; m < sentence.mentions.size(); ++m) {
        const auto& mention = sentence.mentions[m];
        const auto where = "mention " + std::to_string(m) + " (" + mention.entity.str() + ")";
        if (mention.start >= mention.end || mention.end > length) {
            throw ParseError(where + ": span [" + std::to_string(mention.start) + ", " +
                             std::to_string(mention.end) + ") out of range for sentence of length " +
                             std::to_string(length));
        }
        if (m > 0 && mention.start < sentence.mentions[m - 1].start) {
            throw ParseError(where + ": mentions not sorted by start offset");
        }
        if (m > 0 && mention.start < previous_end) {
            throw ParseError(where + ": overlaps the previous mention");
        }
        if (codepoint_substr(sentence.text, mention.start, mention.end) != mention.surface) {
            throw ParseError(where + ": surface \"" + mention.surface +
                             "\" does not match the sentence text");
        }
        previous_end = mention.end;
    }
}

std::optional<AnnotatedDocument> CorpusReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }

        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            fail_line(line_no_, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object()) {
            fail_line(line_no_, "record must be a JSON object");
        }

        AnnotatedDocument doc;
        doc.doc_id = require_string(record, "doc_id", line_no_);
        if (doc.doc_id.empty()) {
            fail_line(line_no_, "empty doc_id");
        }
        if (!seen_.insert(doc.doc_id).second) {
            fail_line(line_no_, "duplicate doc_id \"" + doc.doc_id + "\"");
        }

        const auto& sentences = require_field(record, "sentences", line_no_);
        if (!sentences.is_array()) {
            fail_line(line_no_, "field \"sentences\" must be an array");
        }
        for (std::size_t s = 0; s < sentences.size(); ++s) {
            const auto& js = sentences[s];
            const auto where = "doc \"" + doc.doc_id + "\" sentence " + std::to_string(s);
            if (!js.is_object()) {
                fail_line(line_no_, where + ": must be an object");
            }
            Sentence sentence;
            sentence.text = require_string(js, "text", line_no_);
            const auto& mentions = require_field(js, "mentions", line_no_);
            if (!mentions.is_array()) {
                fail_line(line_no_, where + ": field \"mentions\" must be an array");
            }
            for (const auto& jm : mentions) {
                if (!jm.is_object()) {
                    fail_line(line_no_, where + ": mention must be an object");
                }
                auto entity = require_string(jm, "entity", line_no_);
                if (!EntityId::is_valid(entity)) {
                    fail_line(line_no_, where + ": invalid entity id \"" + entity + "\"");
                }
                sentence.mentions.push_back(Mention{
                    EntityId(std::move(entity)),
                    require_offset(jm, "start", line_no_),
                    require_offset(jm, "end", line_no_),
                    require_string(jm, "surface", line_no_),
                });
            }
            try {
                validate_sentence(sentence);
            } catch (const ParseError& e) {
                fail_line(line_no_, where + ": " + e.what());
            }
            doc.sentences.push_back(std::move(sentence));
        }
        return doc;
    }
    return std::nullopt;
}

std::vector<AnnotatedDocument> parse_corpus(std::istream& in) {
    CorpusReader reader(in);
    std::vector<AnnotatedDocument> docs;
    while (auto doc = reader.next()) {
        docs.push_back(std::move(*doc));
    }
    return docs;
}

void write_document(std::ostream& out, const AnnotatedDocument& doc) {
    json sentences = json::array();
    for (const auto& sentence : doc.sentences) {
        json mentions = json::array();
        for (const auto& m : sentence.mentions) {
            mentions.push_back(json{{"entity", m.entity.str()},
                                    {"start", m.start},
                                    {"end", m.end},
                                    {"surface", m.surface}});
        }
        sentences.push_back(json{{"text", sentence.text}, {"mentions", std::move(mentions)}});
    }
    out << json{{"doc_id", doc.doc_id}, {"sentences", std::move(sentences)}}.dump();
}

void write_corpus(std::ostream& out, const std::vector<AnnotatedDocument>& docs) {
    for (const auto& doc : docs) {
        write_document(out, doc);
        out << '\n';
    }
}

}  // namespace erfusion
