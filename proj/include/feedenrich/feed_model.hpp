#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace feedenrich {

using Timestamp = std::chrono::sys_seconds;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Where the value of an item attribute came from.
enum class Provenance { Original, Extracted, Predicted, Stock };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view name);

// Item attributes that carry provenance. `Description` is the feed's own
// HTML summary; `Content` is the plain full text.
enum class ItemField { Title, Description, Content, Author, Date, Category, Image, Keywords };

std::string_view to_string(ItemField f);
// Throws ConfigError for unknown names.
ItemField parse_item_field(std::string_view name);

struct ImageRef {
  std::string url;
  std::optional<std::uint32_t> width;
  std::optional<std::uint32_t> height;

  // width * height, present iff both dimensions are known.
  std::optional<std::uint64_t> area() const;

  bool operator==(const ImageRef&) const = default;
};

struct RankedTerm {
  std::string term;
  std::uint32_t count = 0;
  bool is_bigram = false;

  bool operator==(const RankedTerm&) const = default;
};

struct FeedItem {
  std::optional<std::string> title;
  std::string link;
  std::optional<std::string> content_html;
  std::optional<std::string> content_text;
  std::optional<std::string> author;
  std::optional<Timestamp> published;
  std::vector<std::string> categories;
  std::optional<ImageRef> image;
  std::vector<RankedTerm> keywords;
  std::map<ItemField, Provenance> provenance;

  bool has(ItemField field) const;
  std::optional<Provenance> origin(ItemField field) const;

  bool operator==(const FeedItem&) const = default;
};

struct FeedDocument {
  std::string title;
  std::string link;
  std::string description;
  std::vector<FeedItem> items;

  bool operator==(const FeedDocument&) const = default;
};

// Returns a copy of `item` with `field`'s origin set to `origin`.
FeedItem tag_provenance(FeedItem item, ItemField field, Provenance origin);
// Same, with the field given by name ("image", "category", ...).
FeedItem tag_provenance(FeedItem item, std::string_view field, Provenance origin);

// Tags every populated field that has no provenance yet as Original and
// drops provenance entries for empty fields.
void normalize_provenance(FeedItem& item);

// Plain-text length (code points) of the item's content: content_text when
// present, otherwise the tag-stripped description.
std::size_t content_length(const FeedItem& item);

}  // namespace feedenrich
