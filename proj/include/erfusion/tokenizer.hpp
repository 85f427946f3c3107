#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace erfusion {

/// Splits text into lowercase terms.
///
/// Text is case-folded with Unicode simple case folding and split on every
/// maximal run of characters that are neither letters nor decimal digits.
/// Terms found in the stopword set are dropped. There is no stemming.
/// Invalid UTF-8 bytes act as separators.
class Tokenizer {
  public:
    Tokenizer() = default;
    explicit Tokenizer(std::unordered_set<std::string> stopwords);

    /// Reads one stopword per line. Entries are normalized with the same
    /// folding rules as the text, so "The" and "the" are equivalent.
    static Tokenizer from_stopword_stream(std::istream& in);

    std::vector<std::string> operator()(std::string_view text) const;

    const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

  private:
    std::unordered_set<std::string> stopwords_;
};

/// Tokenizes with an empty stopword list.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace erfusion
