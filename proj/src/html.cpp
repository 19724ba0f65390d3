#include "feedenrich/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include "feedenrich/text_util.hpp"

namespace feedenrich::html {

namespace {

bool one_of(std::string_view tag, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

bool is_raw_text_element(std::string_view tag) {
  return one_of(tag, {"script", "style", "textarea", "title", "xmp", "iframe", "noembed", "noframes", "noscript"});
}

// Tags that close an open <p>.
bool closes_paragraph(std::string_view tag) {
  return one_of(tag, {"address", "article", "aside", "blockquote", "center", "details", "dialog", "dir",
                      "div", "dl", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
                      "h4", "h5", "h6", "header", "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre",
                      "section", "summary", "table", "ul", "li", "dd", "dt"});
}

bool is_scope_boundary(std::string_view tag) {
  return one_of(tag, {"applet", "caption", "html", "table", "td", "th", "marquee", "object", "template", "button"});
}

bool is_heading(std::string_view tag) { return one_of(tag, {"h1", "h2", "h3", "h4", "h5", "h6"}); }

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", '&'},       {"lt", '<'},         {"gt", '>'},         {"quot", '"'},      {"apos", '\''},
      {"nbsp", 0xA0},     {"copy", 0xA9},      {"reg", 0xAE},       {"trade", 0x2122},  {"hellip", 0x2026},
      {"mdash", 0x2014},  {"ndash", 0x2013},   {"lsquo", 0x2018},   {"rsquo", 0x2019},  {"ldquo", 0x201C},
      {"rdquo", 0x201D},  {"sbquo", 0x201A},   {"bdquo", 0x201E},   {"laquo", 0xAB},    {"raquo", 0xBB},
      {"bull", 0x2022},   {"middot", 0xB7},    {"deg", 0xB0},       {"euro", 0x20AC},   {"pound", 0xA3},
      {"yen", 0xA5},      {"cent", 0xA2},      {"sect", 0xA7},      {"para", 0xB6},     {"times", 0xD7},
      {"divide", 0xF7},   {"plusmn", 0xB1},    {"frac12", 0xBD},    {"frac14", 0xBC},   {"frac34", 0xBE},
      {"iexcl", 0xA1},    {"iquest", 0xBF},    {"shy", 0xAD},       {"thinsp", 0x2009}, {"ensp", 0x2002},
      {"emsp", 0x2003},   {"zwnj", 0x200C},    {"zwj", 0x200D},     {"dagger", 0x2020}, {"Dagger", 0x2021},
      {"prime", 0x2032},  {"larr", 0x2190},    {"rarr", 0x2192},    {"uarr", 0x2191},   {"darr", 0x2193},
      {"agrave", 0xE0},   {"aacute", 0xE1},    {"acirc", 0xE2},     {"atilde", 0xE3},   {"auml", 0xE4},
      {"aring", 0xE5},    {"aelig", 0xE6},     {"ccedil", 0xE7},    {"egrave", 0xE8},   {"eacute", 0xE9},
      {"ecirc", 0xEA},    {"euml", 0xEB},      {"igrave", 0xEC},    {"iacute", 0xED},   {"icirc", 0xEE},
      {"iuml", 0xEF},     {"ntilde", 0xF1},    {"ograve", 0xF2},    {"oacute", 0xF3},   {"ocirc", 0xF4},
      {"otilde", 0xF5},   {"ouml", 0xF6},      {"oslash", 0xF8},    {"ugrave", 0xF9},   {"uacute", 0xFA},
      {"ucirc", 0xFB},    {"uuml", 0xFC},      {"yacute", 0xFD},    {"yuml", 0xFF},     {"szlig", 0xDF},
      {"Agrave", 0xC0},   {"Aacute", 0xC1},    {"Acirc", 0xC2},     {"Auml", 0xC4},     {"Aring", 0xC5},
      {"Ccedil", 0xC7},   {"Egrave", 0xC8},    {"Eacute", 0xC9},    {"Iacute", 0xCD},   {"Ntilde", 0xD1},
      {"Oacute", 0xD3},   {"Ouml", 0xD6},      {"Uacute", 0xDA},    {"Uuml", 0xDC},     {"oelig", 0x153},
      {"OElig", 0x152},   {"scaron", 0x161},   {"Scaron", 0x160},   {"alpha", 0x3B1},   {"beta", 0x3B2},
      {"gamma", 0x3B3},   {"delta", 0x3B4},    {"pi", 0x3C0},       {"mu", 0x3BC},      {"micro", 0xB5},
  };
  return table;
}

// Tries to decode one character reference starting at s[pos] == '&'. On
// success appends to out and returns the number of bytes consumed.
std::size_t decode_reference(std::string_view s, std::size_t pos, std::string& out) {
  std::size_t i = pos + 1;
  if (i < s.size() && s[i] == '#') {
    ++i;
    int base = 10;
    if (i < s.size() && (s[i] == 'x' || s[i] == 'X')) {
      base = 16;
      ++i;
    }
    std::size_t start = i;
    while (i < s.size() && (base == 16 ? std::isxdigit(static_cast<unsigned char>(s[i]))
                                       : std::isdigit(static_cast<unsigned char>(s[i])))) {
      ++i;
    }
    if (i == start || i - start > 8) return 0;
    std::uint32_t cp = 0;
    std::from_chars(s.data() + start, s.data() + i, cp, base);
    if (i < s.size() && s[i] == ';') ++i;
    // windows-1252 remap for the C1 range, as browsers do.
    if (cp >= 0x80 && cp <= 0x9F) {
      std::string tmp = latin1_to_utf8(std::string(1, static_cast<char>(cp)));
      out += tmp;
    } else if (cp == 0) {
      append_utf8(out, 0xFFFD);
    } else {
      append_utf8(out, cp);
    }
    return i - pos;
  }
  std::size_t start = i;
  while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i])) && i - start < 10) ++i;
  if (i == start) return 0;
  std::string_view name = s.substr(start, i - start);
  const auto& table = named_entities();
  auto it = table.find(name);
  if (it == table.end()) it = table.find(to_lower_ascii(name));
  if (it == table.end()) return 0;
  append_utf8(out, it->second);
  if (i < s.size() && s[i] == ';') ++i;
  return i - pos;
}

class TreeBuilder {
 public:
  explicit TreeBuilder(Node& root) { stack_.push_back(&root); }

  void text(std::string data) {
    if (data.empty()) return;
    Node* current = stack_.back();
    if (!current->children.empty() && current->children.back()->is_text()) {
      current->children.back()->text += data;
      return;
    }
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::Text;
    node->text = std::move(data);
    node->parent = current;
    current->children.push_back(std::move(node));
  }

  // Returns the created element so raw-text content can be attached.
  Node* start_tag(std::string name, std::vector<std::pair<std::string, std::string>> attrs, bool self_closing) {
    apply_implied_end_tags(name);
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::Element;
    node->name = std::move(name);
    node->attributes = std::move(attrs);
    Node* current = stack_.back();
    node->parent = current;
    Node* raw = node.get();
    current->children.push_back(std::move(node));
    if (!self_closing && !is_void_element(raw->name)) stack_.push_back(raw);
    return raw;
  }

  void end_tag(std::string_view name) {
    // Pop to the nearest open element with this name; stray end tags are ignored.
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->name == name) {
        stack_.resize(i);
        return;
      }
      // Table cells and structural elements bound the search for inline tags.
      if (is_scope_boundary(stack_[i]->name) && !is_scope_boundary(name) && !closes_paragraph(name)) return;
    }
  }

  void pop_current() {
    if (stack_.size() > 1) stack_.pop_back();
  }

 private:
  // Closes the innermost open `target` if it is reachable before a scope
  // boundary or any of `stop_at`.
  void close_in_scope(std::string_view target, std::initializer_list<std::string_view> stop_at = {}) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      std::string_view open = stack_[i]->name;
      if (open == target) {
        stack_.resize(i);
        return;
      }
      if (is_scope_boundary(open) || one_of(open, stop_at)) return;
    }
  }

  void apply_implied_end_tags(std::string_view tag) {
    if (closes_paragraph(tag)) close_in_scope("p");
    if (tag == "li") close_in_scope("li", {"ul", "ol"});
    if (tag == "dt" || tag == "dd") {
      close_in_scope("dt", {"dl"});
      close_in_scope("dd", {"dl"});
    }
    if (tag == "option") close_in_scope("option", {"select"});
    if (tag == "tr") {
      close_in_scope("td", {"tr"});
      close_in_scope("th", {"tr"});
      close_in_scope("tr", {"tbody", "thead", "tfoot"});
    }
    if (tag == "td" || tag == "th") {
      close_in_scope("td", {"tr"});
      close_in_scope("th", {"tr"});
    }
    if (tag == "a") close_in_scope("a");
    if (is_heading(tag) && is_heading(stack_.back()->name)) stack_.pop_back();
  }

  std::vector<Node*> stack_;
};

class Tokenizer {
 public:
  Tokenizer(std::string_view src, TreeBuilder& builder) : src_(src), builder_(builder) {}

  void run() {
    std::size_t text_start = 0;
    while (pos_ < src_.size()) {
      if (src_[pos_] != '<') {
        ++pos_;
        continue;
      }
      if (!is_markup_start(pos_)) {
        ++pos_;
        continue;
      }
      flush_text(text_start, pos_);
      try_markup();
      text_start = pos_;
      if (pending_raw_) {
        consume_raw_text(pending_raw_);
        pending_raw_ = nullptr;
        text_start = pos_;
      }
    }
    flush_text(text_start, src_.size());
  }

 private:
  void flush_text(std::size_t from, std::size_t to) {
    if (to > from) builder_.text(decode_entities(src_.substr(from, to - from)));
  }

  // Mirrors the cases in which try_markup consumes input.
  bool is_markup_start(std::size_t at) const {
    if (at + 1 >= src_.size()) return false;
    char c = src_[at + 1];
    if (c == '!' || c == '?' || std::isalpha(static_cast<unsigned char>(c))) return true;
    if (c != '/' || at + 2 >= src_.size()) return false;
    char d = src_[at + 2];
    return d == '>' || std::isalpha(static_cast<unsigned char>(d));
  }

  bool starts_with_at(std::size_t at, std::string_view s) const {
    return src_.size() >= at + s.size() && iequals(src_.substr(at, s.size()), s);
  }

  // At '<'. Consumes a tag, comment, doctype or PI and returns true; returns
  // false when the '<' is literal text.
  bool try_markup() {
    std::size_t i = pos_ + 1;
    if (i >= src_.size()) return false;
    char c = src_[i];
    if (c == '!') {
      if (starts_with_at(i, "!--")) {
        auto end = src_.find("-->", i + 3);
        pos_ = end == std::string_view::npos ? src_.size() : end + 3;
        return true;
      }
      if (starts_with_at(i, "![CDATA[")) {
        auto end = src_.find("]]>", i + 8);
        std::size_t stop = end == std::string_view::npos ? src_.size() : end;
        builder_.text(std::string(src_.substr(i + 8, stop - (i + 8))));
        pos_ = end == std::string_view::npos ? src_.size() : end + 3;
        return true;
      }
      auto end = src_.find('>', i);
      pos_ = end == std::string_view::npos ? src_.size() : end + 1;
      return true;
    }
    if (c == '?') {
      auto end = src_.find('>', i);
      pos_ = end == std::string_view::npos ? src_.size() : end + 1;
      return true;
    }
    bool end_tag = false;
    if (c == '/') {
      end_tag = true;
      ++i;
      if (i >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[i]))) {
        if (i < src_.size() && src_[i] == '>') {
          pos_ = i + 1;
          return true;
        }
        return false;
      }
    } else if (!std::isalpha(static_cast<unsigned char>(c))) {
      return false;
    }
    std::size_t name_start = i;
    while (i < src_.size() && !is_space(src_[i]) && src_[i] != '/' && src_[i] != '>') ++i;
    std::string name = to_lower_ascii(src_.substr(name_start, i - name_start));
    // Namespaced names (svg:rect, o:p) keep their prefix.
    std::vector<std::pair<std::string, std::string>> attrs;
    bool self_closing = false;
    while (i < src_.size()) {
      while (i < src_.size() && is_space(src_[i])) ++i;
      if (i >= src_.size()) break;
      if (src_[i] == '>') {
        ++i;
        break;
      }
      if (src_[i] == '/') {
        ++i;
        if (i < src_.size() && src_[i] == '>') {
          self_closing = true;
          ++i;
          break;
        }
        continue;
      }
      std::size_t attr_start = i;
      while (i < src_.size() && !is_space(src_[i]) && src_[i] != '=' && src_[i] != '>' &&
             !(src_[i] == '/' && i + 1 < src_.size() && src_[i + 1] == '>')) {
        ++i;
      }
      std::string attr_name = to_lower_ascii(src_.substr(attr_start, i - attr_start));
      if (attr_name.empty()) {
        ++i;
        continue;
      }
      while (i < src_.size() && is_space(src_[i])) ++i;
      std::string value;
      if (i < src_.size() && src_[i] == '=') {
        ++i;
        while (i < src_.size() && is_space(src_[i])) ++i;
        if (i < src_.size() && (src_[i] == '"' || src_[i] == '\'')) {
          char quote = src_[i++];
          auto close = src_.find(quote, i);
          std::size_t stop = close == std::string_view::npos ? src_.size() : close;
          value = decode_entities(src_.substr(i, stop - i));
          i = close == std::string_view::npos ? src_.size() : close + 1;
        } else {
          std::size_t vstart = i;
          while (i < src_.size() && !is_space(src_[i]) && src_[i] != '>') ++i;
          value = decode_entities(src_.substr(vstart, i - vstart));
        }
      }
      bool duplicate = std::any_of(attrs.begin(), attrs.end(), [&](const auto& a) { return a.first == attr_name; });
      if (!duplicate) attrs.emplace_back(std::move(attr_name), std::move(value));
    }
    pos_ = i;
    if (end_tag) {
      builder_.end_tag(name);
      return true;
    }
    Node* element = builder_.start_tag(name, std::move(attrs), self_closing);
    if (!self_closing && is_raw_text_element(name)) pending_raw_ = element;
    return true;
  }

  // Raw text runs until the matching end tag.
  void consume_raw_text(Node* element) {
    std::string closing = "</" + element->name;
    std::size_t i = pos_;
    std::size_t end = src_.size();
    while (true) {
      auto found = src_.find("</", i);
      if (found == std::string_view::npos) break;
      if (starts_with_at(found, closing)) {
        std::size_t after = found + closing.size();
        if (after >= src_.size() || is_space(src_[after]) || src_[after] == '>' || src_[after] == '/') {
          end = found;
          break;
        }
      }
      i = found + 2;
    }
    std::string_view raw = src_.substr(pos_, end - pos_);
    if (!raw.empty()) {
      builder_.text(element->name == "textarea" || element->name == "title" ? decode_entities(raw)
                                                                            : std::string(raw));
    }
    builder_.pop_current();
    if (end == src_.size()) {
      pos_ = end;
      return;
    }
    auto gt = src_.find('>', end);
    pos_ = gt == std::string_view::npos ? src_.size() : gt + 1;
  }

  std::string_view src_;
  TreeBuilder& builder_;
  std::size_t pos_ = 0;
  Node* pending_raw_ = nullptr;
};

void append_text_content(const Node& node, std::string& out) {
  if (node.is_text()) {
    out += node.text;
    return;
  }
  for (const auto& child : node.children) append_text_content(*child, out);
}

void serialize(const Node& node, std::string& out) {
  if (node.is_text()) {
    bool raw = node.parent && (node.parent->is_element("script") || node.parent->is_element("style"));
    out += raw ? node.text : escape_text(node.text);
    return;
  }
  if (node.kind == Node::Kind::Document) {
    for (const auto& child : node.children) serialize(*child, out);
    return;
  }
  out += '<';
  out += node.name;
  for (const auto& [name, value] : node.attributes) {
    out += ' ';
    out += name;
    out += "=\"";
    out += escape_text(value);
    out += '"';
  }
  out += '>';
  if (is_void_element(node.name)) return;
  for (const auto& child : node.children) serialize(*child, out);
  out += "</";
  out += node.name;
  out += '>';
}

}  // namespace

std::optional<std::string_view> Node::attr(std::string_view attr_name) const {
  for (const auto& [name, value] : attributes) {
    if (name == attr_name) return std::string_view(value);
  }
  return std::nullopt;
}

std::string Node::text_content() const {
  std::string out;
  append_text_content(*this, out);
  return out;
}

Document::Document() : root_(std::make_unique<Node>()) { root_->kind = Node::Kind::Document; }

Document parse(std::string_view source) {
  Document doc;
  TreeBuilder builder(doc.root());
  Tokenizer tokenizer(source, builder);
  tokenizer.run();
  return doc;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      std::size_t used = decode_reference(s, i, out);
      if (used > 0) {
        i += used;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string outer_html(const Node& node) {
  std::string out;
  serialize(node, out);
  return out;
}

bool is_void_element(std::string_view tag) {
  return one_of(tag, {"area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param",
                      "source", "track", "wbr", "keygen", "basefont", "frame"});
}

bool is_block_element(std::string_view tag) {
  return one_of(tag, {"address", "article", "aside", "blockquote", "body", "br", "caption", "center", "dd",
                      "details", "dialog", "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer",
                      "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup", "hr", "html", "li",
                      "main", "nav", "ol", "p", "pre", "section", "summary", "table", "tbody", "td", "tfoot",
                      "th", "thead", "tr", "ul"});
}

void visit_elements(const Node& root, const std::function<bool(const Node&)>& visitor) {
  for (const auto& child : root.children) {
    if (!child->is_element()) continue;
    if (visitor(*child)) visit_elements(*child, visitor);
  }
}

std::vector<const Node*> find_all(const Node& root, std::string_view tag) {
  std::vector<const Node*> out;
  visit_elements(root, [&](const Node& n) {
    if (n.name == tag) out.push_back(&n);
    return true;
  });
  return out;
}

namespace {

struct BlockCollector {
  const std::function<bool(const Node&)>& keep;
  std::vector<std::string> lines;
  std::string current;

  void flush() {
    std::string line = collapse_whitespace(current);
    if (!line.empty()) lines.push_back(std::move(line));
    current.clear();
  }

  void walk(const Node& node) {
    for (const auto& child : node.children) {
      if (child->is_text()) {
        if (!keep || (node.is_element() && keep(node))) current += child->text;
        continue;
      }
      if (!child->is_element()) continue;
      if (one_of(child->name, {"script", "style", "noscript", "template"})) continue;
      bool block = is_block_element(child->name);
      if (block) flush();
      walk(*child);
      if (block) flush();
    }
  }
};

}  // namespace

std::string block_text(const Node& root, const std::function<bool(const Node&)>& keep) {
  BlockCollector collector{keep, {}, {}};
  collector.walk(root);
  collector.flush();
  std::string out;
  for (std::size_t i = 0; i < collector.lines.size(); ++i) {
    if (i) out += '\n';
    out += collector.lines[i];
  }
  return out;
}

std::string to_plain_text(std::string_view source) {
  Document doc = parse(source);
  return block_text(doc.root());
}

}  // namespace feedenrich::html
