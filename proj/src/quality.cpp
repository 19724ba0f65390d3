#include "feedenrich/quality.hpp"

#include <charconv>

#include "feedenrich/text_util.hpp"
#include "json.hpp"

namespace feedenrich {

void QualityWeights::validate() const {
  std::uint64_t sum = std::uint64_t{title} + content + author + date + category + image;
  if (sum != 100) throw ConfigError("quality weights must sum to 100, got " + std::to_string(sum));
}

QualityWeights QualityWeights::parse(std::string_view spec) {
  auto parts = split(spec, ',');
  if (parts.size() != 6) throw ConfigError("--weights needs six comma-separated integers");
  std::array<std::uint32_t, 6> values{};
  for (std::size_t i = 0; i < 6; ++i) {
    auto t = trim(parts[i]);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), values[i]);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
      throw ConfigError("invalid weight '" + std::string(t) + "'");
    }
  }
  QualityWeights w{values[0], values[1], values[2], values[3], values[4], values[5]};
  w.validate();
  return w;
}

std::string_view to_string(Phase p) { return p == Phase::Before ? "before" : "after"; }

QualityFlags derive_flags(const FeedItem& item, Phase phase, std::size_t original_content_length,
                          const FlagOptions& options) {
  QualityFlags flags;
  flags.title = item.has(ItemField::Title);
  flags.author = item.has(ItemField::Author);
  flags.date = item.has(ItemField::Date);
  flags.category = item.has(ItemField::Category);
  flags.image = item.has(ItemField::Image);
  std::size_t length = content_length(item);
  if (phase == Phase::Before) {
    flags.content = length >= options.full_text_chars;
  } else {
    flags.content = length > original_content_length || original_content_length >= options.full_text_chars;
  }
  return flags;
}

double compute_item_quality(const QualityFlags& flags, const QualityWeights& weights) {
  std::uint32_t score = (flags.title ? weights.title : 0) + (flags.content ? weights.content : 0) +
                        (flags.author ? weights.author : 0) + (flags.date ? weights.date : 0) +
                        (flags.category ? weights.category : 0) + (flags.image ? weights.image : 0);
  return static_cast<double>(score) / 100.0;
}

QualityReport analyze_dataset(std::span<const FeedItem> items, Phase phase, std::span<const std::size_t> original_lengths,
                              const QualityWeights& weights, const FlagOptions& options) {
  weights.validate();
  QualityReport report;
  report.phase = phase;
  report.item_count = items.size();
  if (items.empty()) return report;
  double total_length = 0.0;
  double total_quality = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const FeedItem& item = items[i];
    std::size_t length = content_length(item);
    std::size_t original = i < original_lengths.size() ? original_lengths[i] : length;
    total_length += static_cast<double>(length);
    QualityFlags flags = derive_flags(item, phase, original, options);
    total_quality += compute_item_quality(flags, weights);
    report.items_with_image += flags.image;
    report.items_with_category += flags.category;
    report.items_with_author += flags.author;
    for (const auto& [field, origin] : item.provenance) {
      if (item.has(field)) ++report.provenance_counts[field][origin];
    }
  }
  report.avg_content_length_chars = total_length / static_cast<double>(items.size());
  report.avg_item_quality = total_quality / static_cast<double>(items.size());
  return report;
}

std::string report_to_json(const QualityReport& report) {
  nlohmann::ordered_json j;
  j["phase"] = to_string(report.phase);
  j["Items"] = report.item_count;
  j["Average Content Length"] = report.avg_content_length_chars;
  j["Articles with Images"] = report.items_with_image;
  j["Articles with Categories"] = report.items_with_category;
  j["Articles with Author"] = report.items_with_author;
  j["Average Item Quality"] = report.avg_item_quality;
  nlohmann::ordered_json prov = nlohmann::ordered_json::object();
  for (const auto& [field, counts] : report.provenance_counts) {
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& [origin, n] : counts) per[std::string(to_string(origin))] = n;
    prov[std::string(to_string(field))] = per;
  }
  j["provenance"] = prov;
  return j.dump(2);
}

}  // namespace feedenrich
