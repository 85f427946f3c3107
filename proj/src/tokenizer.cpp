#include "erfusion/tokenizer.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace erfusion {

Tokenizer::Tokenizer(std::unordered_set<std::string> stopwords)
    : stopwords_(std::move(stopwords)) {}

Tokenizer Tokenizer::from_stopword_stream(std::istream& in) {
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        for (auto& term : tokenize(line)) {
            words.insert(std::move(term));
        }
    }
    return Tokenizer(std::move(words));
}

std::vector<std::string> Tokenizer::operator()(std::string_view text) const {
    std::vector<std::string> terms;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            if (!stopwords_.contains(current)) {
                terms.push_back(std::move(current));
            }
            current.clear();
        }
    };

    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t offset = 0;
    while (offset < length) {
        UChar32 c = 0;
        U8_NEXT(bytes, offset, length, c);
        if (c < 0 || !u_isalnum(c)) {
            flush();
            continue;
        }
        UChar32 folded = u_foldCase(c, U_FOLD_CASE_DEFAULT);
        char buf[U8_MAX_LENGTH];
        int32_t n = 0;
        U8_APPEND_UNSAFE(buf, n, folded);
        current.append(buf, static_cast<std::size_t>(n));
    }
    flush();
    return terms;
}

std::vector<std::string> tokenize(std::string_view text) {
    static const Tokenizer plain;
    return plain(text);
}

}  // namespace erfusion
