#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "feedenrich/feed_model.hpp"

namespace feedenrich {

// Extension namespaces used by enhanced feeds.
namespace ns {
inline constexpr std::string_view kContent = "http://purl.org/rss/1.0/modules/content/";
inline constexpr std::string_view kDublinCore = "http://purl.org/dc/elements/1.1/";
inline constexpr std::string_view kMedia = "http://search.yahoo.com/mrss/";
// Keyword counts and per-field provenance, which no public vocabulary covers.
inline constexpr std::string_view kEnhancement = "urn:feedenrich:enhancement:1";
}  // namespace ns

class FeedParseError : public std::runtime_error {
 public:
  FeedParseError(const std::string& message, std::size_t byte_offset);
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Well-formed XML that is not an RSS 2.0 document.
class FeedStructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SerializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseStats {
  std::size_t items_seen = 0;
  std::size_t items_dropped = 0;  // items without a usable link
};

FeedDocument parse_feed(std::string_view xml);
FeedDocument parse_feed(std::string_view xml, ParseStats& stats);

struct NamespaceDecl {
  std::string prefix;
  std::string uri;
};

struct EnhancedFeedSerialization {
  std::string xml;  // UTF-8
  std::vector<NamespaceDecl> namespaces;
};

EnhancedFeedSerialization serialize_enhanced(const FeedDocument& feed);

bool is_well_formed_xml(std::string_view xml);

// Lenient RFC 822 / RFC 2822 date parsing (ISO 8601 accepted as a
// fallback). Invalid or unrecognized input yields nullopt.
std::optional<Timestamp> parse_feed_date(std::string_view text);
// "Tue, 10 Jun 2003 04:00:00 GMT"
std::string format_rfc822(Timestamp t);

}  // namespace feedenrich
