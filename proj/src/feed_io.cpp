#include "feedenrich/feed_io.hpp"

#include <expat.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cctype>
#include <charconv>
#include <memory>
#include <set>

#include "feedenrich/html.hpp"
#include "feedenrich/text_util.hpp"
#include "feedenrich/url.hpp"

namespace feedenrich {

FeedParseError::FeedParseError(const std::string& message, std::size_t byte_offset)
    : std::runtime_error(message + " at byte " + std::to_string(byte_offset)), byte_offset_(byte_offset) {}

namespace {

constexpr char kNsSep = '\x1F';

// Expanded element name: namespace URI plus local name.
struct QName {
  std::string uri;
  std::string local;
};

struct XmlElement {
  QName name;
  std::vector<std::pair<std::string, std::string>> attributes;  // local names only
  std::string text;
  std::vector<std::unique_ptr<XmlElement>> children;

  std::optional<std::string_view> attr(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return std::string_view(v);
    }
    return std::nullopt;
  }

  const XmlElement* child(std::string_view uri, std::string_view local) const {
    for (const auto& c : children) {
      if (c->name.uri == uri && c->name.local == local) return c.get();
    }
    return nullptr;
  }
};

QName split_name(const XML_Char* raw) {
  std::string_view s(raw);
  auto sep = s.find(kNsSep);
  if (sep == std::string_view::npos) return {"", std::string(s)};
  return {std::string(s.substr(0, sep)), std::string(s.substr(sep + 1))};
}

struct ParseContext {
  std::unique_ptr<XmlElement> root;
  std::vector<XmlElement*> stack;
};

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto* ctx = static_cast<ParseContext*>(data);
  auto element = std::make_unique<XmlElement>();
  element->name = split_name(name);
  for (int i = 0; atts[i]; i += 2) element->attributes.emplace_back(split_name(atts[i]).local, atts[i + 1]);
  XmlElement* raw = element.get();
  if (ctx->stack.empty()) {
    ctx->root = std::move(element);
  } else {
    ctx->stack.back()->children.push_back(std::move(element));
  }
  ctx->stack.push_back(raw);
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto* ctx = static_cast<ParseContext*>(data);
  ctx->stack.pop_back();
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto* ctx = static_cast<ParseContext*>(data);
  if (!ctx->stack.empty()) ctx->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};
using ParserHandle = std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter>;

std::unique_ptr<XmlElement> parse_xml(std::string_view xml) {
  ParserHandle parser(XML_ParserCreateNS(nullptr, kNsSep));
  if (!parser) throw std::bad_alloc();
  ParseContext ctx;
  XML_SetUserData(parser.get(), &ctx);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
    auto offset = XML_GetCurrentByteIndex(parser.get());
    throw FeedParseError(XML_ErrorString(XML_GetErrorCode(parser.get())),
                         offset < 0 ? xml.size() : static_cast<std::size_t>(offset));
  }
  if (!ctx.root) throw FeedParseError("no root element", xml.size());
  return std::move(ctx.root);
}

std::optional<std::string> trimmed_text(const XmlElement* e) {
  if (!e) return std::nullopt;
  auto t = trim(e->text);
  if (t.empty()) return std::nullopt;
  return std::string(t);
}

std::optional<std::uint32_t> parse_dimension(std::optional<std::string_view> v) {
  if (!v) return std::nullopt;
  auto t = trim(*v);
  std::uint32_t out = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size() || out == 0) return std::nullopt;
  return out;
}

bool is_image_type(std::optional<std::string_view> type) { return type && istarts_with(trim(*type), "image/"); }

std::optional<ImageRef> image_from(const XmlElement& item, const Url* base) {
  auto make = [&](const XmlElement& e) -> std::optional<ImageRef> {
    auto url = e.attr("url");
    if (!url || trim(*url).empty()) return std::nullopt;
    std::string resolved(trim(*url));
    if (!is_absolute_url(resolved)) {
      if (!base) return std::nullopt;
      auto r = resolve_url(*base, resolved);
      if (!r) return std::nullopt;
      resolved = r->str();
    }
    ImageRef ref{resolved, parse_dimension(e.attr("width")), parse_dimension(e.attr("height"))};
    if (!ref.width || !ref.height) ref.width = ref.height = std::nullopt;
    return ref;
  };
  for (const auto& c : item.children) {
    if (c->name.uri == ns::kMedia && c->name.local == "thumbnail") {
      if (auto r = make(*c)) return r;
    }
  }
  for (const auto& c : item.children) {
    if (c->name.uri == ns::kMedia && c->name.local == "content" &&
        (c->attr("medium") == std::optional<std::string_view>("image") || is_image_type(c->attr("type")))) {
      if (auto r = make(*c)) return r;
    }
    // media:group wraps media:content in some feeds.
    if (c->name.uri == ns::kMedia && c->name.local == "group") {
      if (auto r = image_from(*c, base)) return r;
    }
  }
  for (const auto& c : item.children) {
    if (c->name.uri.empty() && c->name.local == "enclosure" && is_image_type(c->attr("type"))) {
      if (auto r = make(*c)) return r;
    }
  }
  return std::nullopt;
}

std::optional<std::string> resolve_link(const std::optional<std::string>& raw, const Url* base) {
  if (!raw) return std::nullopt;
  if (auto abs = parse_url(*raw)) return abs->str();
  if (!base) return std::nullopt;
  auto r = resolve_url(*base, *raw);
  if (!r) return std::nullopt;
  return r->str();
}

FeedItem parse_item(const XmlElement& e, const Url* base, bool& dropped) {
  FeedItem item;
  item.title = trimmed_text(e.child("", "title"));
  auto link = resolve_link(trimmed_text(e.child("", "link")), base);
  if (!link) {
    const XmlElement* guid = e.child("", "guid");
    if (guid && guid->attr("isPermaLink") != std::optional<std::string_view>("false")) {
      link = resolve_link(trimmed_text(guid), base);
    }
  }
  dropped = !link;
  if (dropped) return item;
  item.link = *link;
  item.content_html = trimmed_text(e.child("", "description"));
  if (auto encoded = trimmed_text(e.child(ns::kContent, "encoded"))) {
    std::string text = html::to_plain_text(*encoded);
    if (!text.empty()) item.content_text = std::move(text);
  }
  item.author = trimmed_text(e.child(ns::kDublinCore, "creator"));
  if (!item.author) item.author = trimmed_text(e.child("", "author"));
  if (auto date = trimmed_text(e.child("", "pubDate"))) item.published = parse_feed_date(*date);
  if (!item.published) {
    if (auto date = trimmed_text(e.child(ns::kDublinCore, "date"))) item.published = parse_feed_date(*date);
  }
  for (const auto& c : e.children) {
    if (c->name.uri.empty() && c->name.local == "category") {
      if (auto t = trimmed_text(c.get())) item.categories.push_back(*t);
    }
  }
  item.image = image_from(e, base);

  bool explicit_keywords = false;
  for (const auto& c : e.children) {
    if (c->name.uri != ns::kEnhancement) continue;
    if (c->name.local == "keyword") {
      auto term = trimmed_text(c.get());
      auto count = parse_dimension(c->attr("count"));
      if (!term) continue;
      explicit_keywords = true;
      item.keywords.push_back({*term, count.value_or(1), c->attr("bigram") == std::optional<std::string_view>("true")});
    } else if (c->name.local == "provenance") {
      auto field = c->attr("field");
      auto origin = trimmed_text(c.get());
      if (!field || !origin) continue;
      auto parsed = parse_provenance(*origin);
      if (!parsed) continue;
      try {
        item.provenance[parse_item_field(*field)] = *parsed;
      } catch (const ConfigError&) {
        // Unknown field names from other producers are ignored.
      }
    }
  }
  if (!explicit_keywords) {
    if (auto kw = trimmed_text(e.child(ns::kMedia, "keywords"))) {
      for (const auto& part : split(*kw, ',')) {
        auto t = trim(part);
        if (t.empty()) continue;
        item.keywords.push_back({std::string(t), 1, t.find(' ') != std::string_view::npos});
      }
    }
  }
  normalize_provenance(item);
  return item;
}

// --- dates ---------------------------------------------------------------

std::optional<int> month_from_name(std::string_view name) {
  static constexpr std::array<std::string_view, 12> kMonths = {"jan", "feb", "mar", "apr", "may", "jun",
                                                               "jul", "aug", "sep", "oct", "nov", "dec"};
  if (name.size() < 3) return std::nullopt;
  std::string lower = to_lower_ascii(name.substr(0, 3));
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (kMonths[i] == lower) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::optional<int> to_int(std::string_view s) {
  int out = 0;
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

// Offset from UTC in minutes, or nullopt when the token is not a zone.
std::optional<int> zone_offset(std::string_view z) {
  if (z.empty()) return std::nullopt;
  if (z[0] == '+' || z[0] == '-') {
    std::string digits;
    for (char c : z.substr(1)) {
      if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
    }
    if (digits.size() != 4 && digits.size() != 2) return std::nullopt;
    int hh = *to_int(std::string_view(digits).substr(0, 2));
    int mm = digits.size() == 4 ? *to_int(std::string_view(digits).substr(2, 2)) : 0;
    int sign = z[0] == '-' ? -1 : 1;
    return sign * (hh * 60 + mm);
  }
  static const std::array<std::pair<std::string_view, int>, 12> kZones = {{{"gmt", 0},
                                                                            {"ut", 0},
                                                                            {"utc", 0},
                                                                            {"z", 0},
                                                                            {"est", -300},
                                                                            {"edt", -240},
                                                                            {"cst", -360},
                                                                            {"cdt", -300},
                                                                            {"mst", -420},
                                                                            {"mdt", -360},
                                                                            {"pst", -480},
                                                                            {"pdt", -420}}};
  std::string lower = to_lower_ascii(z);
  for (const auto& [name, offset] : kZones) {
    if (name == lower) return offset;
  }
  return std::nullopt;
}

std::optional<Timestamp> make_timestamp(int year, int month, int day, int hh, int mm, int ss, int offset_min) {
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) return std::nullopt;
  auto t = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} - minutes{offset_min};
  return time_point_cast<seconds>(t);
}

std::optional<Timestamp> parse_rfc822(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (is_space(c) || c == ',') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  std::size_t i = 0;
  // Optional day-of-week.
  if (i < tokens.size() && std::isalpha(static_cast<unsigned char>(tokens[i][0])) && !month_from_name(tokens[i])) ++i;
  if (i + 3 > tokens.size()) return std::nullopt;
  std::optional<int> day;
  std::optional<int> month;
  // "10 Jun 2003" or, leniently, "Jun 10 2003".
  if ((day = to_int(tokens[i])) && (month = month_from_name(tokens[i + 1]))) {
  } else if ((month = month_from_name(tokens[i])) && (day = to_int(tokens[i + 1]))) {
  } else {
    return std::nullopt;
  }
  auto year = to_int(tokens[i + 2]);
  if (!year) return std::nullopt;
  if (tokens[i + 2].size() == 2) *year += *year < 50 ? 2000 : 1900;
  i += 3;
  int hh = 0, mm = 0, ss = 0;
  if (i < tokens.size()) {
    auto parts = split(tokens[i], ':');
    if (parts.size() >= 2 && parts.size() <= 3) {
      auto h = to_int(parts[0]);
      auto m = to_int(parts[1]);
      auto s = parts.size() == 3 ? to_int(parts[2]) : std::optional<int>(0);
      if (!h || !m || !s) return std::nullopt;
      hh = *h;
      mm = *m;
      ss = *s;
      ++i;
    }
  }
  int offset = 0;
  if (i < tokens.size()) {
    if (auto z = zone_offset(tokens[i])) offset = *z;
  }
  return make_timestamp(*year, *month, *day, hh, mm, ss, offset);
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  // YYYY-MM-DD[THH:MM[:SS[.fff]]][Z|+HH:MM]
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto year = to_int(text.substr(0, 4));
  auto month = to_int(text.substr(5, 2));
  auto day = to_int(text.substr(8, 2));
  if (!year || !month || !day) return std::nullopt;
  int hh = 0, mm = 0, ss = 0, offset = 0;
  std::string_view rest = text.substr(10);
  if (!rest.empty() && (rest[0] == 'T' || rest[0] == 't' || rest[0] == ' ')) {
    rest.remove_prefix(1);
    if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
    auto h = to_int(rest.substr(0, 2));
    auto m = to_int(rest.substr(3, 2));
    if (!h || !m) return std::nullopt;
    hh = *h;
    mm = *m;
    rest.remove_prefix(5);
    if (rest.size() >= 3 && rest[0] == ':') {
      auto s = to_int(rest.substr(1, 2));
      if (!s) return std::nullopt;
      ss = *s;
      rest.remove_prefix(3);
    }
    if (!rest.empty() && rest[0] == '.') {
      rest.remove_prefix(1);
      while (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest[0]))) rest.remove_prefix(1);
    }
    if (!rest.empty()) {
      auto z = zone_offset(rest);
      if (!z) return std::nullopt;
      offset = *z;
    }
  } else if (!rest.empty()) {
    return std::nullopt;
  }
  return make_timestamp(*year, *month, *day, hh, mm, ss, offset);
}

// --- serialization -------------------------------------------------------

std::string_view image_mime(std::string_view url) {
  std::string lower = to_lower_ascii(url.substr(0, url.find_first_of("?#")));
  auto ends_with = [&](std::string_view ext) {
    return lower.size() >= ext.size() && lower.compare(lower.size() - ext.size(), ext.size(), ext) == 0;
  };
  if (ends_with(".png")) return "image/png";
  if (ends_with(".gif")) return "image/gif";
  if (ends_with(".webp")) return "image/webp";
  if (ends_with(".svg")) return "image/svg+xml";
  if (ends_with(".avif")) return "image/avif";
  return "image/jpeg";
}

class XmlWriter {
 public:
  void element(std::string_view name, std::string_view text, int depth) {
    indent(depth);
    out_ += '<';
    out_ += name;
    out_ += '>';
    out_ += xml_escape(text);
    out_ += "</";
    out_ += name;
    out_ += ">\n";
  }

  void raw_line(std::string_view line, int depth) {
    indent(depth);
    out_ += line;
    out_ += '\n';
  }

  std::string& buffer() { return out_; }

 private:
  void indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 2, ' '); }
  std::string out_;
};

std::string attr(std::string_view name, std::string_view value) {
  return " " + std::string(name) + "=\"" + xml_escape(value) + "\"";
}

// content_text lines become paragraphs so the plain text survives a
// round trip through HTML-to-text conversion.
std::string text_as_html(std::string_view text) {
  std::string out;
  for (const auto& line : split(text, '\n')) {
    auto t = trim(line);
    if (t.empty()) continue;
    if (!out.empty()) out += '\n';
    out += "<p>" + html::escape_text(t) + "</p>";
  }
  return out;
}

}  // namespace

FeedDocument parse_feed(std::string_view xml) {
  ParseStats stats;
  return parse_feed(xml, stats);
}

FeedDocument parse_feed(std::string_view xml, ParseStats& stats) {
  stats = {};
  auto root = parse_xml(xml);
  if (!root->name.uri.empty() || root->name.local != "rss") {
    throw FeedStructureError("root element is <" + root->name.local + ">, expected <rss>");
  }
  const XmlElement* channel = root->child("", "channel");
  if (!channel) throw FeedStructureError("<rss> has no <channel> element");

  FeedDocument doc;
  doc.title = std::string(trim(channel->child("", "title") ? channel->child("", "title")->text : ""));
  doc.description =
      std::string(trim(channel->child("", "description") ? channel->child("", "description")->text : ""));
  auto channel_link = trimmed_text(channel->child("", "link"));
  std::optional<Url> base = channel_link ? parse_url(*channel_link) : std::nullopt;
  if (!base) throw FeedStructureError("channel <link> is missing or not an absolute URL");
  doc.link = base->str();

  for (const auto& c : channel->children) {
    if (!c->name.uri.empty() || c->name.local != "item") continue;
    ++stats.items_seen;
    bool dropped = false;
    FeedItem item = parse_item(*c, &*base, dropped);
    if (dropped) {
      ++stats.items_dropped;
      continue;
    }
    doc.items.push_back(std::move(item));
  }
  return doc;
}

EnhancedFeedSerialization serialize_enhanced(const FeedDocument& feed) {
  std::set<std::string_view> used;
  XmlWriter body;
  body.element("title", feed.title, 2);
  body.element("link", feed.link, 2);
  body.element("description", feed.description, 2);
  for (const auto& item : feed.items) {
    if (item.link.empty()) throw SerializationError("item without link cannot be serialized");
    body.raw_line("<item>", 2);
    if (item.title) body.element("title", *item.title, 3);
    body.element("link", item.link, 3);
    if (item.content_html) body.element("description", *item.content_html, 3);
    if (item.has(ItemField::Content)) {
      body.element("content:encoded", text_as_html(*item.content_text), 3);
      used.insert("content");
    }
    if (item.has(ItemField::Author)) {
      body.element("dc:creator", *item.author, 3);
      used.insert("dc");
    }
    if (item.published) body.element("pubDate", format_rfc822(*item.published), 3);
    for (const auto& category : item.categories) body.element("category", category, 3);
    if (item.has(ItemField::Image)) {
      const ImageRef& img = *item.image;
      body.raw_line("<enclosure" + attr("url", img.url) + attr("type", image_mime(img.url)) + attr("length", "0") + "/>",
                    3);
      std::string thumb = "<media:thumbnail" + attr("url", img.url);
      if (img.area()) thumb += attr("width", std::to_string(*img.width)) + attr("height", std::to_string(*img.height));
      body.raw_line(thumb + "/>", 3);
      used.insert("media");
    }
    if (!item.keywords.empty()) {
      std::string joined;
      for (const auto& kw : item.keywords) {
        if (!joined.empty()) joined += ", ";
        joined += kw.term;
      }
      body.element("media:keywords", joined, 3);
      used.insert("media");
      for (const auto& kw : item.keywords) {
        body.raw_line("<fe:keyword" + attr("count", std::to_string(kw.count)) +
                          attr("bigram", kw.is_bigram ? "true" : "false") + ">" + xml_escape(kw.term) +
                          "</fe:keyword>",
                      3);
      }
      used.insert("fe");
    }
    for (const auto& [field, origin] : item.provenance) {
      if (origin == Provenance::Original || !item.has(field)) continue;
      body.raw_line("<fe:provenance" + attr("field", to_string(field)) + ">" + std::string(to_string(origin)) +
                        "</fe:provenance>",
                    3);
      used.insert("fe");
    }
    body.raw_line("</item>", 2);
  }

  EnhancedFeedSerialization out;
  const std::pair<std::string_view, std::string_view> known[] = {
      {"content", ns::kContent}, {"dc", ns::kDublinCore}, {"media", ns::kMedia}, {"fe", ns::kEnhancement}};
  std::string root = "<rss version=\"2.0\"";
  for (const auto& [prefix, uri] : known) {
    if (!used.count(prefix)) continue;
    root += " xmlns:" + std::string(prefix) + "=\"" + std::string(uri) + "\"";
    out.namespaces.push_back({std::string(prefix), std::string(uri)});
  }
  root += ">";
  out.xml = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" + root + "\n  <channel>\n" + body.buffer() +
            "  </channel>\n</rss>\n";
  return out;
}

bool is_well_formed_xml(std::string_view xml) {
  try {
    parse_xml(xml);
    return true;
  } catch (const FeedParseError&) {
    return false;
  }
}

std::optional<Timestamp> parse_feed_date(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (auto t = parse_rfc822(text)) return t;
  return parse_iso8601(text);
}

std::string format_rfc822(Timestamp t) {
  using namespace std::chrono;
  static constexpr std::array<std::string_view, 7> kDays = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
  static constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  weekday wd{day_point};
  hh_mm_ss hms{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s, %02u %s %04d %02d:%02d:%02d GMT", kDays[wd.c_encoding()].data(),
                static_cast<unsigned>(ymd.day()), kMonths[static_cast<unsigned>(ymd.month()) - 1].data(),
                static_cast<int>(ymd.year()), static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
  return buf;
}

}  // namespace feedenrich
