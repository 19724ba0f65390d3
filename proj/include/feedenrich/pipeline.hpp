#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "feedenrich/classifier.hpp"
#include "feedenrich/content_extractor.hpp"
#include "feedenrich/crawler.hpp"
#include "feedenrich/feed_model.hpp"
#include "feedenrich/image_selector.hpp"
#include "feedenrich/keyword_extractor.hpp"
#include "feedenrich/quality.hpp"

namespace feedenrich {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitNothingCrawlable = 3,
  kExitTrainingError = 4,
};

struct EnhanceOptions {
  CrawlPolicy crawl;
  ImagePolicy image;
  DensityConfig density;
  QualityWeights weights;
  FlagOptions flags;
  double confidence_threshold = 0.8;
  std::size_t keyword_count = 10;
};

using LogSink = std::function<void(std::string_view)>;

// Collaborators of one enhancement run. Only transport is required.
struct EnhanceContext {
  const Transport* transport = nullptr;
  const ImageProvider* provider = nullptr;
  const OvrModel* model = nullptr;
  const StopwordList* stopwords = nullptr;
  LogSink log;
};

struct EnhanceStats {
  std::size_t items = 0;
  std::size_t crawled = 0;
  std::size_t crawl_failed = 0;
  std::size_t content_extracted = 0;
  std::size_t keywords_extracted = 0;
  std::size_t images_extracted = 0;
  std::size_t images_stock = 0;
  std::size_t authors_extracted = 0;
  std::size_t categories_predicted = 0;
  std::size_t categories_below_threshold = 0;
  std::size_t stage_failures = 0;
};

struct EnhanceResult {
  FeedDocument feed;
  QualityReport before;
  QualityReport after;
  EnhanceStats stats;
};

// Runs every enrichment stage on one item given its fetched page. Only
// empty fields are filled; a failing stage is logged and skipped.
FeedItem enhance_item(const FeedItem& item, const FetchResult& page, const EnhanceOptions& options,
                      const EnhanceContext& context, EnhanceStats& stats, std::size_t index = 0);

// Crawls all item links once, enhances each item that was fetched and
// carries the rest through unchanged.
EnhanceResult enhance_feed(const FeedDocument& feed, const EnhanceOptions& options, const EnhanceContext& context);

// {"before": ..., "after": ...}
std::string report_pair_to_json(const QualityReport& before, const QualityReport& after);

// Command-line entry point with enhance, train and report subcommands.
// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace feedenrich
