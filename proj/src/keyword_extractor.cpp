#include "feedenrich/keyword_extractor.hpp"

#include <algorithm>
#include <unordered_map>

#include "feedenrich/text_util.hpp"

namespace feedenrich {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

struct TermStats {
  std::uint32_t count = 0;
  std::size_t first = 0;
  bool bigram = false;
};

}  // namespace

TokenStream tokenize(std::string_view text) {
  TokenStream out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) continue;
    std::string token = to_lower_ascii(text.substr(start, i - start));
    if (utf8_length(token) >= 2) out.tokens.push_back(std::move(token));
  }
  return out;
}

std::vector<RankedTerm> rank_terms(const std::vector<std::string>& filtered_tokens, std::size_t k) {
  std::unordered_map<std::string, TermStats> table;
  for (std::size_t i = 0; i < filtered_tokens.size(); ++i) {
    auto [it, inserted] = table.try_emplace(filtered_tokens[i], TermStats{0, i, false});
    ++it->second.count;
    if (i + 1 < filtered_tokens.size()) {
      auto [bt, binserted] = table.try_emplace(filtered_tokens[i] + " " + filtered_tokens[i + 1], TermStats{0, i, true});
      ++bt->second.count;
    }
  }
  std::vector<std::pair<const std::string*, TermStats>> entries;
  entries.reserve(table.size());
  for (const auto& [term, stats] : table) entries.emplace_back(&term, stats);
  auto before = [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    if (a.second.first != b.second.first) return a.second.first < b.second.first;
    if (a.second.bigram != b.second.bigram) return a.second.bigram;
    return *a.first < *b.first;
  };
  std::size_t keep = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep), entries.end(), before);
  std::vector<RankedTerm> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back({*entries[i].first, entries[i].second.count, entries[i].second.bigram});
  return out;
}

std::vector<RankedTerm> extract_keywords(std::string_view text, std::size_t k, const StopwordList& stopwords) {
  TokenStream stream = tokenize(text);
  std::vector<std::string> filtered;
  filtered.reserve(stream.tokens.size());
  for (auto& t : stream.tokens) {
    if (!stopwords.contains(t)) filtered.push_back(std::move(t));
  }
  return rank_terms(filtered, k);
}

}  // namespace feedenrich
