#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "feedenrich/feed_model.hpp"

namespace feedenrich {

// Binary attribute flags of one item. Content and category are separate
// flags even though the quality formula writes both with the same letter.
struct QualityFlags {
  bool title = false;
  bool content = false;
  bool author = false;
  bool date = false;
  bool category = false;
  bool image = false;

  bool operator==(const QualityFlags&) const = default;
};

struct QualityWeights {
  std::uint32_t title = 15;
  std::uint32_t content = 51;
  std::uint32_t author = 2;
  std::uint32_t date = 2;
  std::uint32_t category = 15;
  std::uint32_t image = 15;

  // Throws ConfigError unless the weights sum to 100.
  void validate() const;
  // "t,c,a,d,cat,i" with six non-negative integers summing to 100.
  static QualityWeights parse(std::string_view spec);
};

enum class Phase { Before, After };

std::string_view to_string(Phase p);

struct FlagOptions {
  // Content length at which an unenhanced item counts as full text.
  std::size_t full_text_chars = 1000;
};

// Before: content flag set iff the item's content length reaches
// full_text_chars. After: set iff the enhanced content is longer than
// `original_content_length`, or the original already counted as full text.
QualityFlags derive_flags(const FeedItem& item, Phase phase, std::size_t original_content_length,
                          const FlagOptions& options = {});

// Weighted sum of the flags divided by 100, in [0, 1].
double compute_item_quality(const QualityFlags& flags, const QualityWeights& weights = {});

struct QualityReport {
  Phase phase = Phase::Before;
  std::size_t item_count = 0;
  double avg_content_length_chars = 0.0;
  std::size_t items_with_image = 0;
  std::size_t items_with_category = 0;
  std::size_t items_with_author = 0;
  double avg_item_quality = 0.0;
  // field -> provenance -> number of items whose populated field has it
  std::map<ItemField, std::map<Provenance, std::size_t>> provenance_counts;
};

// `original_lengths[i]` is item i's content length before enhancement; it
// is only used in the After phase and may be empty, in which case each
// item's own length is taken as the original.
QualityReport analyze_dataset(std::span<const FeedItem> items, Phase phase,
                              std::span<const std::size_t> original_lengths = {},
                              const QualityWeights& weights = {}, const FlagOptions& options = {});

// JSON object keyed by the report row names ("Average Content Length",
// "Articles with Images", ...), plus "provenance".
std::string report_to_json(const QualityReport& report);

}  // namespace feedenrich
