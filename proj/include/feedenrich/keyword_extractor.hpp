#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "feedenrich/feed_model.hpp"

namespace feedenrich {

class StopwordList {
 public:
  // The built-in English list (179 entries, the usual NLP default).
  static const StopwordList& english();
  // One word per line, UTF-8; blank lines and lines starting with '#' are
  // ignored. Throws ConfigError when the file cannot be read.
  static StopwordList from_file(const std::string& path);

  StopwordList() = default;
  explicit StopwordList(const std::vector<std::string>& words);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

struct TokenStream {
  std::vector<std::string> tokens;
};

// Splits on every character that is not an ASCII letter or digit, lowercases,
// and drops tokens shorter than two characters. Bytes of multi-byte UTF-8
// sequences count as letters so accented words stay whole.
TokenStream tokenize(std::string_view text);

// Unigram and bigram counts over the stopword-filtered token stream, merged
// and ranked by count (desc), first occurrence (asc), bigram before unigram,
// then lexicographically. Returns at most k terms.
std::vector<RankedTerm> extract_keywords(std::string_view text, std::size_t k,
                                         const StopwordList& stopwords = StopwordList::english());

// Same ranking applied to an already tokenized, already filtered stream.
std::vector<RankedTerm> rank_terms(const std::vector<std::string>& filtered_tokens, std::size_t k);

}  // namespace feedenrich
