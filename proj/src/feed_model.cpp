#include "feedenrich/feed_model.hpp"

#include <array>
#include <utility>

#include "feedenrich/html.hpp"
#include "feedenrich/text_util.hpp"

namespace feedenrich {

namespace {

constexpr std::array<std::pair<ItemField, std::string_view>, 8> kFieldNames = {{
    {ItemField::Title, "title"},
    {ItemField::Description, "description"},
    {ItemField::Content, "content"},
    {ItemField::Author, "author"},
    {ItemField::Date, "date"},
    {ItemField::Category, "category"},
    {ItemField::Image, "image"},
    {ItemField::Keywords, "keywords"},
}};

constexpr std::array<std::pair<Provenance, std::string_view>, 4> kProvenanceNames = {{
    {Provenance::Original, "original"},
    {Provenance::Extracted, "extracted"},
    {Provenance::Predicted, "predicted"},
    {Provenance::Stock, "stock"},
}};

bool non_empty(const std::optional<std::string>& s) { return s && !trim(*s).empty(); }

}  // namespace

std::string_view to_string(Provenance p) {
  for (const auto& [value, name] : kProvenanceNames) {
    if (value == p) return name;
  }
  return "original";
}

std::optional<Provenance> parse_provenance(std::string_view name) {
  for (const auto& [value, known] : kProvenanceNames) {
    if (known == name) return value;
  }
  return std::nullopt;
}

std::string_view to_string(ItemField f) {
  for (const auto& [value, name] : kFieldNames) {
    if (value == f) return name;
  }
  return "title";
}

ItemField parse_item_field(std::string_view name) {
  for (const auto& [value, known] : kFieldNames) {
    if (known == name) return value;
  }
  throw ConfigError("unknown item field '" + std::string(name) + "'");
}

std::optional<std::uint64_t> ImageRef::area() const {
  if (!width || !height) return std::nullopt;
  return static_cast<std::uint64_t>(*width) * *height;
}

bool FeedItem::has(ItemField field) const {
  switch (field) {
    case ItemField::Title: return non_empty(title);
    case ItemField::Description: return non_empty(content_html);
    case ItemField::Content: return non_empty(content_text);
    case ItemField::Author: return non_empty(author);
    case ItemField::Date: return published.has_value();
    case ItemField::Category: return !categories.empty();
    case ItemField::Image: return image.has_value() && !image->url.empty();
    case ItemField::Keywords: return !keywords.empty();
  }
  return false;
}

std::optional<Provenance> FeedItem::origin(ItemField field) const {
  auto it = provenance.find(field);
  if (it == provenance.end()) return std::nullopt;
  return it->second;
}

FeedItem tag_provenance(FeedItem item, ItemField field, Provenance origin) {
  item.provenance[field] = origin;
  return item;
}

FeedItem tag_provenance(FeedItem item, std::string_view field, Provenance origin) {
  return tag_provenance(std::move(item), parse_item_field(field), origin);
}

void normalize_provenance(FeedItem& item) {
  for (const auto& [field, name] : kFieldNames) {
    if (item.has(field)) {
      item.provenance.try_emplace(field, Provenance::Original);
    } else {
      item.provenance.erase(field);
    }
  }
}

std::size_t content_length(const FeedItem& item) {
  if (non_empty(item.content_text)) return utf8_length(*item.content_text);
  if (non_empty(item.content_html)) return utf8_length(html::to_plain_text(*item.content_html));
  return 0;
}

}  // namespace feedenrich
