#include "feedenrich/author_extractor.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

#include "feedenrich/html.hpp"
#include "feedenrich/text_util.hpp"
#include "feedenrich/url.hpp"

namespace feedenrich {

namespace {

constexpr std::array<std::string_view, 7> kProfileSegments = {"author", "authors", "people", "user",
                                                             "users",  "editor",  "editors"};

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else if (s[i] == '+') {
      out += ' ';
    } else {
      out += s[i];
    }
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string beautify_slug(std::string_view slug) {
  std::string spaced;
  spaced.reserve(slug.size());
  for (char c : slug) spaced += (c == '-' || c == '_') ? ' ' : c;
  std::string collapsed = collapse_whitespace(spaced);
  if (collapsed.empty()) throw std::invalid_argument("empty slug");
  bool word_start = true;
  for (char& c : collapsed) {
    if (c == ' ') {
      word_start = true;
      continue;
    }
    if (word_start) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    } else if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>(c - 'A' + 'a');
    }
    word_start = false;
  }
  return collapsed;
}

std::optional<std::string> author_slug_from_path(std::string_view path) {
  auto segments = split(path, '/');
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    std::string lower = to_lower_ascii(segments[i]);
    if (std::find(kProfileSegments.begin(), kProfileSegments.end(), lower) == kProfileSegments.end()) continue;
    std::string slug = percent_decode(segments[i + 1]);
    if (trim(slug).empty() || all_digits(trim(slug))) return std::nullopt;
    std::string probe = collapse_whitespace(slug);
    if (std::all_of(probe.begin(), probe.end(), [](char c) { return c == '-' || c == '_' || c == ' '; })) {
      return std::nullopt;
    }
    return slug;
  }
  return std::nullopt;
}

std::optional<std::string> extract_author(std::string_view html, std::string_view base) {
  html::Document doc = html::parse(html);
  for (const html::Node* meta : html::find_all(doc.root(), "meta")) {
    auto name = meta->attr("name");
    auto content = meta->attr("content");
    if (!name || !content || !iequals(trim(*name), "author")) continue;
    std::string value = collapse_whitespace(*content);
    if (!value.empty()) return value;
  }

  auto base_url = parse_url(base);
  for (const html::Node* a : html::find_all(doc.root(), "a")) {
    auto href = a->attr("href");
    if (!href) continue;
    std::optional<Url> target = parse_url(*href);
    if (!target && base_url) target = resolve_url(*base_url, *href);
    if (!target) continue;
    if (auto slug = author_slug_from_path(target->path)) return beautify_slug(*slug);
  }
  return std::nullopt;
}

}  // namespace feedenrich
