#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "feedenrich/feed_model.hpp"

namespace feedenrich {

struct ImageProviderQuery {
  std::vector<std::string> keywords;  // never empty
  std::uint32_t min_width = 600;
  std::uint32_t min_height = 400;
};

struct StockImage {
  std::string url;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

// Transport or backend failure inside a provider.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Source of replacement images searched by keyword. Implementations must be
// safe to call from several threads.
class ImageProvider {
 public:
  virtual ~ImageProvider() = default;
  virtual bool enabled() const { return true; }
  // nullopt on a miss; throws ProviderError on failure.
  virtual std::optional<StockImage> query(const ImageProviderQuery& q) const = 0;
};

class NullImageProvider final : public ImageProvider {
 public:
  bool enabled() const override { return false; }
  std::optional<StockImage> query(const ImageProviderQuery&) const override { return std::nullopt; }
};

// Local keyword -> image table. Each line of the table file is
//   keyword<TAB>url<TAB>width<TAB>height
// Keywords are matched case-insensitively; the first query keyword with an
// entry meeting the minimum dimensions wins.
class FixtureImageProvider final : public ImageProvider {
 public:
  FixtureImageProvider() = default;
  explicit FixtureImageProvider(std::multimap<std::string, StockImage> table);
  static FixtureImageProvider from_file(const std::string& path);

  std::optional<StockImage> query(const ImageProviderQuery& q) const override;

 private:
  std::multimap<std::string, StockImage> table_;
};

struct ImagePolicy {
  std::uint64_t min_area = 40000;  // 200x200
  std::uint32_t stock_min_width = 600;
  std::uint32_t stock_min_height = 400;
  std::size_t query_keywords = 3;
  std::uint64_t max_tracking_pixel_area = 4;
};

// Every <img> in document order, src resolved against base. data: URIs and
// tracking pixels are dropped.
std::vector<ImageRef> collect_images(std::string_view html, std::string_view base, const ImagePolicy& policy = {});

// Largest known area (earliest on ties); else the first image; else nullopt.
std::optional<ImageRef> select_main_image(std::span<const ImageRef> images);

struct ImageChoice {
  std::optional<ImageRef> image;
  bool from_stock = false;
};

using WarningSink = std::function<void(std::string_view)>;

// Queries the provider when `current` is missing or below the area floor.
// Provider failures degrade to returning `current`.
ImageChoice replace_if_inadequate(const std::optional<ImageRef>& current, std::span<const RankedTerm> keywords,
                                  const ImageProvider& provider, const ImagePolicy& policy = {},
                                  const WarningSink& warn = {});

}  // namespace feedenrich
