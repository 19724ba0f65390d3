#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace feedenrich::html {

// Minimal DOM produced by the tolerant parser. Comments, doctypes and
// processing instructions are dropped during parsing.
struct Node {
  enum class Kind { Document, Element, Text };

  Kind kind = Kind::Element;
  std::string name;  // lowercase tag name for elements
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // decoded character data for text nodes
  std::vector<std::unique_ptr<Node>> children;
  Node* parent = nullptr;

  bool is_element() const { return kind == Kind::Element; }
  bool is_element(std::string_view tag) const { return kind == Kind::Element && name == tag; }
  bool is_text() const { return kind == Kind::Text; }

  // Attribute lookup by lowercase name.
  std::optional<std::string_view> attr(std::string_view attr_name) const;

  // Concatenated descendant text, unnormalized.
  std::string text_content() const;
};

class Document {
 public:
  Document();
  Document(Document&&) noexcept = default;
  Document& operator=(Document&&) noexcept = default;

  const Node& root() const { return *root_; }
  Node& root() { return *root_; }

 private:
  std::unique_ptr<Node> root_;
};

// Parses HTML the way real pages require: missing end tags, stray end tags,
// unquoted attributes and misnested inline elements never fail. Only the
// elements present in the source are created; no html/head/body is implied.
Document parse(std::string_view source);

// Decodes character references (&amp;, &#39;, &#x2014;, common named ones).
std::string decode_entities(std::string_view s);

std::string escape_text(std::string_view s);

// Serializes a node and its subtree back to HTML.
std::string outer_html(const Node& node);

bool is_void_element(std::string_view tag);
// Elements whose content starts a new text block (p, div, li, h1, ...).
bool is_block_element(std::string_view tag);

// Depth-first, document-order visit of every element. Returning false from
// the visitor skips that element's subtree.
void visit_elements(const Node& root, const std::function<bool(const Node&)>& visitor);

std::vector<const Node*> find_all(const Node& root, std::string_view tag);

// Plain text of a subtree: text of block elements (p, div, li, ...) becomes
// separate lines joined by '\n', whitespace collapsed within a line, empty
// lines dropped. script/style/noscript/template content is skipped. When
// `keep` is given, only text nodes whose parent element satisfies it count.
std::string block_text(const Node& root, const std::function<bool(const Node&)>& keep = {});

// Parses `source` and returns its block_text.
std::string to_plain_text(std::string_view source);

}  // namespace feedenrich::html
