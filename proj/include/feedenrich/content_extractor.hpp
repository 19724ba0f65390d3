#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace feedenrich {

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No tag reaches the density threshold.
class NoContentError : public ExtractionError {
 public:
  using ExtractionError::ExtractionError;
};

struct TagDensity {
  std::size_t index = 0;
  std::string tag_name;
  std::size_t char_count = 0;  // direct text only, whitespace collapsed

  bool operator==(const TagDensity&) const = default;
};

struct DensityConfig {
  std::size_t absolute_floor = 20;
  double relative_threshold = 0.05;  // fraction of the densest tag
  std::size_t max_gap = 3;           // non-dense tags tolerated inside a run
};

struct RegionBounds {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::size_t total_chars = 0;

  bool operator==(const RegionBounds&) const = default;
};

struct ContentRegion {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::size_t total_chars = 0;
  std::string html;
  std::string text;
};

// Elements whose whole subtree is ignored before counting.
bool is_excluded_subtree(std::string_view tag);

// Characters of directly contained text for every retained element, in
// document order. html and body are containers and never listed.
std::vector<TagDensity> compute_density_profile(std::string_view html, const DensityConfig& config = {});

// max(absolute_floor, ceil(relative_threshold * max char_count)).
std::size_t density_threshold(std::span<const TagDensity> profile, const DensityConfig& config = {});

// The contiguous run of tags with the largest character total, where a run
// starts and ends on dense tags and never spans more than max_gap
// consecutive non-dense tags. Ties go to the earliest start. Throws
// NoContentError when no tag is dense.
RegionBounds locate_main_region(std::span<const TagDensity> profile, const DensityConfig& config = {});

ContentRegion extract_text_corpus(std::string_view html, const DensityConfig& config = {});

}  // namespace feedenrich
