#include "feedenrich/content_extractor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "feedenrich/html.hpp"
#include "feedenrich/text_util.hpp"

namespace feedenrich {

namespace {

struct ProfiledDocument {
  html::Document doc;
  std::vector<TagDensity> profile;
  std::vector<const html::Node*> nodes;  // parallel to profile
};

std::size_t direct_text_chars(const html::Node& element) {
  std::string direct;
  for (const auto& child : element.children) {
    if (child->is_text()) {
      direct += child->text;
      direct += ' ';
    }
  }
  return utf8_length(collapse_whitespace(direct));
}

ProfiledDocument profile_document(std::string_view source) {
  if (!is_valid_utf8(source)) throw ExtractionError("page is not valid UTF-8");
  ProfiledDocument out{html::parse(source), {}, {}};
  html::visit_elements(out.doc.root(), [&](const html::Node& node) {
    if (is_excluded_subtree(node.name)) return false;
    if (node.name == "html" || node.name == "body") return true;
    out.profile.push_back({out.profile.size(), node.name, direct_text_chars(node)});
    out.nodes.push_back(&node);
    return true;
  });
  return out;
}

}  // namespace

bool is_excluded_subtree(std::string_view tag) {
  static const std::unordered_set<std::string_view> kExcluded = {
      "script", "style", "noscript", "template", "head", "nav", "header", "footer", "aside", "form"};
  return kExcluded.count(tag) > 0;
}

std::vector<TagDensity> compute_density_profile(std::string_view html, const DensityConfig&) {
  return profile_document(html).profile;
}

std::size_t density_threshold(std::span<const TagDensity> profile, const DensityConfig& config) {
  std::size_t max_chars = 0;
  for (const auto& t : profile) max_chars = std::max(max_chars, t.char_count);
  auto relative = static_cast<std::size_t>(std::ceil(config.relative_threshold * static_cast<double>(max_chars)));
  return std::max(config.absolute_floor, relative);
}

RegionBounds locate_main_region(std::span<const TagDensity> profile, const DensityConfig& config) {
  const std::size_t tau = density_threshold(profile, config);
  std::vector<std::size_t> prefix(profile.size() + 1, 0);
  for (std::size_t i = 0; i < profile.size(); ++i) prefix[i + 1] = prefix[i] + profile[i].char_count;

  std::optional<RegionBounds> best;
  std::optional<RegionBounds> run;
  auto close_run = [&] {
    if (!run) return;
    run->total_chars = prefix[run->end + 1] - prefix[run->start];
    if (!best || run->total_chars > best->total_chars) best = run;
    run.reset();
  };
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].char_count < tau) continue;
    if (run && i - run->end - 1 <= config.max_gap) {
      run->end = i;
    } else {
      close_run();
      run = RegionBounds{i, i, 0};
    }
  }
  close_run();
  if (!best) throw NoContentError("no tag reaches " + std::to_string(tau) + " characters");
  return *best;
}

ContentRegion extract_text_corpus(std::string_view html, const DensityConfig& config) {
  ProfiledDocument profiled = profile_document(html);
  RegionBounds bounds = locate_main_region(profiled.profile, config);

  std::unordered_set<const html::Node*> members(profiled.nodes.begin() + static_cast<std::ptrdiff_t>(bounds.start),
                                                profiled.nodes.begin() + static_cast<std::ptrdiff_t>(bounds.end) + 1);
  ContentRegion region;
  region.start = bounds.start;
  region.end = bounds.end;
  region.total_chars = bounds.total_chars;
  for (std::size_t i = bounds.start; i <= bounds.end; ++i) {
    const html::Node* node = profiled.nodes[i];
    if (node->parent && members.count(node->parent)) continue;
    region.html += html::outer_html(*node);
  }
  region.text = html::block_text(profiled.doc.root(), [&](const html::Node& n) { return members.count(&n) > 0; });
  return region;
}

}  // namespace feedenrich
