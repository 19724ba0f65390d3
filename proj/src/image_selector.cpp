#include "feedenrich/image_selector.hpp"

#include <charconv>
#include <fstream>

#include "feedenrich/html.hpp"
#include "feedenrich/text_util.hpp"
#include "feedenrich/url.hpp"

namespace feedenrich {

namespace {

std::optional<std::uint32_t> html_dimension(std::optional<std::string_view> value) {
  if (!value) return std::nullopt;
  auto t = trim(*value);
  // "300px" is tolerated; percentages and other units are not.
  if (t.size() > 2 && iequals(t.substr(t.size() - 2), "px")) t.remove_suffix(2);
  std::uint32_t out = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
  return out;
}

std::optional<std::uint32_t> parse_uint(std::string_view s) {
  std::uint32_t out = 0;
  s = trim(s);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return out;
}

}  // namespace

FixtureImageProvider::FixtureImageProvider(std::multimap<std::string, StockImage> table) {
  for (auto& [k, v] : table) table_.emplace(to_lower_ascii(k), std::move(v));
}

FixtureImageProvider FixtureImageProvider::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read stock image table '" + path + "'");
  std::multimap<std::string, StockImage> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split(t, '\t');
    std::optional<std::uint32_t> w, h;
    if (fields.size() == 4) {
      w = parse_uint(fields[2]);
      h = parse_uint(fields[3]);
    }
    if (fields.size() != 4 || !w || !h || !is_absolute_url(fields[1])) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected keyword<TAB>url<TAB>width<TAB>height");
    }
    table.emplace(std::string(trim(fields[0])), StockImage{std::string(trim(fields[1])), *w, *h});
  }
  return FixtureImageProvider(std::move(table));
}

std::optional<StockImage> FixtureImageProvider::query(const ImageProviderQuery& q) const {
  for (const auto& keyword : q.keywords) {
    auto [lo, hi] = table_.equal_range(to_lower_ascii(keyword));
    for (auto it = lo; it != hi; ++it) {
      if (it->second.width >= q.min_width && it->second.height >= q.min_height) return it->second;
    }
  }
  return std::nullopt;
}

std::vector<ImageRef> collect_images(std::string_view html, std::string_view base, const ImagePolicy& policy) {
  std::vector<ImageRef> out;
  auto base_url = parse_url(base);
  html::Document doc = html::parse(html);
  for (const html::Node* img : html::find_all(doc.root(), "img")) {
    auto src = img->attr("src");
    if (!src || trim(*src).empty()) continue;
    if (istarts_with(trim(*src), "data:")) continue;
    std::optional<std::string> resolved;
    if (auto abs = parse_url(*src)) {
      resolved = abs->str();
    } else if (base_url) {
      if (auto r = resolve_url(*base_url, *src)) resolved = r->str();
    }
    if (!resolved) continue;
    ImageRef ref{*resolved, html_dimension(img->attr("width")), html_dimension(img->attr("height"))};
    if (!ref.width || !ref.height) ref.width = ref.height = std::nullopt;
    if (auto area = ref.area(); area && *area <= policy.max_tracking_pixel_area) continue;
    out.push_back(std::move(ref));
  }
  return out;
}

std::optional<ImageRef> select_main_image(std::span<const ImageRef> images) {
  const ImageRef* best = nullptr;
  for (const auto& img : images) {
    auto area = img.area();
    if (!area) continue;
    if (!best || *area > *best->area()) best = &img;
  }
  if (best) return *best;
  if (!images.empty()) return images.front();
  return std::nullopt;
}

ImageChoice replace_if_inadequate(const std::optional<ImageRef>& current, std::span<const RankedTerm> keywords,
                                  const ImageProvider& provider, const ImagePolicy& policy, const WarningSink& warn) {
  ImageChoice unchanged{current, false};
  // An image of unknown size is not known to be low-resolution and is kept.
  bool inadequate = !current || (current->area() && *current->area() < policy.min_area);
  if (!inadequate || !provider.enabled() || keywords.empty()) return unchanged;

  ImageProviderQuery query;
  query.min_width = policy.stock_min_width;
  query.min_height = policy.stock_min_height;
  for (std::size_t i = 0; i < keywords.size() && query.keywords.size() < policy.query_keywords; ++i) {
    query.keywords.push_back(keywords[i].term);
  }
  std::optional<StockImage> hit;
  try {
    hit = provider.query(query);
  } catch (const std::exception& e) {
    if (warn) warn(std::string("image provider failed: ") + e.what());
    return unchanged;
  }
  if (!hit || hit->width < query.min_width || hit->height < query.min_height) return unchanged;
  ImageRef stock{hit->url, hit->width, hit->height};
  if (current && current->area() && *stock.area() < *current->area()) return unchanged;
  return {stock, true};
}

}  // namespace feedenrich
