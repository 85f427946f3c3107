#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "erfusion/error.hpp"
#include "erfusion/index.hpp"

namespace erfusion {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kDocsFile = "metadocs.jsonl";
constexpr const char* kDictFile = "dict.tsv";

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

std::ifstream open_in(const fs::path& path, const char* what) {
    if (!fs::exists(path)) {
        throw IndexFormatError(std::string("missing ") + what + " file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    return in;
}

[[noreturn]] void corrupt(const fs::path& path, std::size_t record, const std::string& what) {
    throw IndexFormatError(path.string() + ": record " + std::to_string(record) + ": " + what);
}

IndexKind parse_kind(const std::string& s, const fs::path& path) {
    if (s == "entity") return IndexKind::entity;
    if (s == "relationship") return IndexKind::relationship;
    corrupt(path, 1, "unknown index kind \"" + s + "\"");
}

PairCanon parse_canon(const std::string& s, const fs::path& path) {
    if (s == "unordered") return PairCanon::unordered;
    if (s == "ordered") return PairCanon::ordered;
    corrupt(path, 1, "unknown pair canonicalization \"" + s + "\"");
}

}  // namespace

void save_index(const Index& index, const fs::path& dir) {
    fs::create_directories(dir);
    const auto& stats = index.stats();

    {
        json meta = {
            {"format_version", kIndexFormatVersion},
            {"kind", to_string(index.kind())},
            {"pair_canon", to_string(index.pair_canon())},
            {"num_meta_docs", stats.num_meta_docs},
            {"total_terms", stats.total_terms},
            {"avg_len", stats.avg_len},
            {"vocabulary_size", stats.terms.size()},
            {"stopwords", index.stopwords()},
        };
        auto out = open_out(dir / kMetaFile);
        out << meta.dump(2) << '\n';
    }

    {
        auto out = open_out(dir / kDocsFile);
        for (const auto& doc : index.meta_docs()) {
            json key = json::array();
            for (const auto& part : doc.key.parts()) {
                key.push_back(part.str());
            }
            json tf = json::object();
            for (const auto& [term, count] : doc.tf) {
                tf[term] = count;
            }
            json record = {{"key", std::move(key)},
                           {"length", doc.length},
                           {"doc_ids", doc.doc_ids},
                           {"tf", std::move(tf)}};
            out << record.dump() << '\n';
        }
    }

    {
        std::vector<std::pair<std::string_view, TermStats>> dict(stats.terms.begin(),
                                                                 stats.terms.end());
        std::sort(dict.begin(), dict.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        auto out = open_out(dir / kDictFile);
        for (const auto& [term, ts] : dict) {
            out << term << '\t' << ts.coll_tf << '\t' << ts.doc_freq << '\n';
        }
    }
}

Index load_index(const fs::path& dir) {
    const auto meta_path = dir / kMetaFile;
    json meta;
    {
        auto in = open_in(meta_path, "meta");
        try {
            meta = json::parse(in);
        } catch (const json::exception& e) {
            corrupt(meta_path, 1, std::string("malformed JSON: ") + e.what());
        }
    }

    IndexKind kind{};
    PairCanon canon{};
    std::uint64_t num_meta_docs = 0;
    std::uint64_t total_terms = 0;
    std::uint64_t vocabulary_size = 0;
    double avg_len = 0.0;
    std::vector<std::string> stopwords;
    try {
        const int version = meta.at("format_version").get<int>();
        if (version != kIndexFormatVersion) {
            throw IndexFormatError(meta_path.string() + ": index format version " +
                                   std::to_string(version) + " but this build reads version " +
                                   std::to_string(kIndexFormatVersion));
        }
        kind = parse_kind(meta.at("kind").get<std::string>(), meta_path);
        canon = parse_canon(meta.at("pair_canon").get<std::string>(), meta_path);
        num_meta_docs = meta.at("num_meta_docs").get<std::uint64_t>();
        total_terms = meta.at("total_terms").get<std::uint64_t>();
        vocabulary_size = meta.at("vocabulary_size").get<std::uint64_t>();
        avg_len = meta.at("avg_len").get<double>();
        stopwords = meta.at("stopwords").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        corrupt(meta_path, 1, e.what());
    }

    const auto docs_path = dir / kDocsFile;
    std::vector<MetaDocument> docs;
    {
        auto in = open_in(docs_path, "meta-document");
        std::string line;
        std::size_t record = 0;
        while (std::getline(in, line)) {
            ++record;
            try {
                auto j = json::parse(line);
                const auto parts = j.at("key").get<std::vector<std::string>>();
                if (parts.size() == 1) {
                    docs.push_back(MetaDocument{MetaKey(EntityId(parts[0])), {}, 0, {}});
                } else if (parts.size() == 2) {
                    docs.push_back(
                        MetaDocument{MetaKey(EntityId(parts[0]), EntityId(parts[1])), {}, 0, {}});
                } else {
                    corrupt(docs_path, record, "key must have one or two entities");
                }
                auto& doc = docs.back();
                if (docs.size() > 1 && !(docs[docs.size() - 2].key < doc.key)) {
                    corrupt(docs_path, record, "keys out of canonical order");
                }
                doc.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
                for (const auto& [term, count] : j.at("tf").items()) {
                    auto c = count.get<std::uint64_t>();
                    if (c == 0) {
                        corrupt(docs_path, record, "zero count for term \"" + term + "\"");
                    }
                    doc.tf.emplace_back(term, c);
                    doc.length += c;
                }
                if (doc.length != j.at("length").get<std::uint64_t>()) {
                    corrupt(docs_path, record, "length does not equal the sum of term counts");
                }
            } catch (const json::exception& e) {
                corrupt(docs_path, record, e.what());
            } catch (const ParseError& e) {
                corrupt(docs_path, record, e.what());
            }
        }
    }

    Index index(kind, canon, std::move(docs), std::move(stopwords));
    const auto& stats = index.stats();
    if (stats.num_meta_docs != num_meta_docs || stats.total_terms != total_terms ||
        stats.avg_len != avg_len || stats.terms.size() != vocabulary_size) {
        corrupt(meta_path, 1, "collection statistics do not match " + std::string(kDocsFile));
    }

    const auto dict_path = dir / kDictFile;
    {
        auto in = open_in(dict_path, "dictionary");
        std::string line;
        std::size_t record = 0;
        while (std::getline(in, line)) {
            ++record;
            std::istringstream fields(line);
            std::string term;
            TermStats expected;
            if (!std::getline(fields, term, '\t') || !(fields >> expected.coll_tf >> expected.doc_freq)) {
                corrupt(dict_path, record, "expected term<TAB>coll_tf<TAB>doc_freq");
            }
            auto it = stats.terms.find(term);
            if (it == stats.terms.end() || !(it->second == expected)) {
                corrupt(dict_path, record, "entry for \"" + term + "\" does not match " + kDocsFile);
            }
        }
        if (record != stats.terms.size()) {
            corrupt(dict_path, record, "dictionary has " + std::to_string(record) +
                                           " terms, meta-documents have " +
                                           std::to_string(stats.terms.size()));
        }
    }
    return index;
}

}  // namespace erfusion
