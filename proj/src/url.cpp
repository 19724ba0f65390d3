#include "feedenrich/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

#include "feedenrich/text_util.hpp"

namespace feedenrich {

namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && static_cast<unsigned char>(s.front()) <= 0x20) s.remove_prefix(1);
  while (!s.empty() && static_cast<unsigned char>(s.back()) <= 0x20) s.remove_suffix(1);
  return s;
}

// Splits "scheme:" off a reference; empty when the reference is relative.
std::string scheme_of(std::string_view ref) {
  if (ref.empty() || !std::isalpha(static_cast<unsigned char>(ref[0]))) return {};
  for (std::size_t i = 1; i < ref.size(); ++i) {
    char c = ref[i];
    if (c == ':') return to_lower_ascii(ref.substr(0, i));
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')) return {};
  }
  return {};
}

struct Split {
  std::string_view path;
  std::optional<std::string_view> query;
  std::optional<std::string_view> fragment;
};

Split split_path_query_fragment(std::string_view rest) {
  Split out;
  if (auto hash = rest.find('#'); hash != std::string_view::npos) {
    out.fragment = rest.substr(hash + 1);
    rest = rest.substr(0, hash);
  }
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    out.query = rest.substr(q + 1);
    rest = rest.substr(0, q);
  }
  out.path = rest;
  return out;
}

bool parse_authority(std::string_view authority, Url& url) {
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  std::string_view host = authority;
  std::string_view port;
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string_view::npos) return false;
    host = authority.substr(0, close + 1);
    if (close + 1 < authority.size()) {
      if (authority[close + 1] != ':') return false;
      port = authority.substr(close + 2);
    }
  } else if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port = authority.substr(colon + 1);
  }
  if (host.empty()) return false;
  url.host = to_lower_ascii(host);
  url.port = 0;
  if (!port.empty()) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value <= 0 || value > 65535) return false;
    url.port = value;
  }
  return true;
}

std::string merge_paths(const Url& base, std::string_view ref_path) {
  if (base.path.empty()) return "/" + std::string(ref_path);
  auto slash = base.path.rfind('/');
  return base.path.substr(0, slash + 1) + std::string(ref_path);
}

}  // namespace

int Url::effective_port() const {
  if (port != 0) return port;
  return scheme == "https" ? 443 : 80;
}

std::string Url::host_key() const { return host + ":" + std::to_string(effective_port()); }

std::string Url::request_target() const {
  std::string out = path.empty() ? "/" : path;
  if (!query.empty()) out += "?" + query;
  return out;
}

std::string Url::str() const {
  std::string out = scheme + "://" + host;
  if (port != 0 && port != (scheme == "https" ? 443 : 80)) out += ":" + std::to_string(port);
  out += request_target();
  if (!fragment.empty()) out += "#" + fragment;
  return out;
}

std::optional<Url> parse_url(std::string_view text) {
  text = trim_view(text);
  std::string scheme = scheme_of(text);
  if (scheme != "http" && scheme != "https") return std::nullopt;
  std::string_view rest = text.substr(scheme.size() + 1);
  if (rest.substr(0, 2) != "//") return std::nullopt;
  rest.remove_prefix(2);
  auto end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, end);
  Url url;
  url.scheme = std::move(scheme);
  if (!parse_authority(authority, url)) return std::nullopt;
  rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
  Split parts = split_path_query_fragment(rest);
  url.path = parts.path.empty() ? "/" : remove_dot_segments(parts.path);
  if (parts.query) url.query = std::string(*parts.query);
  if (parts.fragment) url.fragment = std::string(*parts.fragment);
  return url;
}

bool is_absolute_url(std::string_view text) { return parse_url(text).has_value(); }

std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string_view> out;
  bool absolute = !path.empty() && path.front() == '/';
  bool trailing = false;
  std::size_t pos = absolute ? 1 : 0;
  while (pos <= path.size()) {
    auto next = path.find('/', pos);
    std::string_view seg = path.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    bool last = next == std::string_view::npos;
    trailing = false;
    if (seg == ".") {
      trailing = true;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing = true;
    } else {
      out.push_back(seg);
    }
    if (last) break;
    pos = next + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) result += '/';
    result += out[i];
  }
  if (trailing && !result.empty() && result.back() != '/') result += '/';
  return result;
}

std::optional<Url> resolve_url(const Url& base, std::string_view reference) {
  reference = trim_view(reference);
  std::string scheme = scheme_of(reference);
  if (!scheme.empty()) {
    if (scheme != "http" && scheme != "https") return std::nullopt;
    // "http:foo" without authority is treated as relative, as browsers do.
    if (reference.substr(scheme.size() + 1, 2) == "//") return parse_url(reference);
    if (scheme != base.scheme) return std::nullopt;
    reference.remove_prefix(scheme.size() + 1);
  }
  if (reference.substr(0, 2) == "//") return parse_url(base.scheme + ":" + std::string(reference));

  Url target = base;
  target.fragment.clear();
  Split parts = split_path_query_fragment(reference);
  if (parts.path.empty()) {
    if (parts.query) target.query = std::string(*parts.query);
  } else {
    if (parts.path.front() == '/') {
      target.path = remove_dot_segments(parts.path);
    } else {
      target.path = remove_dot_segments(merge_paths(base, parts.path));
    }
    target.query = parts.query ? std::string(*parts.query) : std::string{};
  }
  if (parts.fragment) target.fragment = std::string(*parts.fragment);
  if (target.path.empty()) target.path = "/";
  return target;
}

std::optional<std::string> resolve_url_string(std::string_view base, std::string_view reference) {
  auto parsed = parse_url(base);
  if (!parsed) return std::nullopt;
  auto resolved = resolve_url(*parsed, reference);
  if (!resolved) return std::nullopt;
  return resolved->str();
}

}  // namespace feedenrich
