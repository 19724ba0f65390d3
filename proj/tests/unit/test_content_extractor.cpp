#include <gtest/gtest.h>

#include <random>

#include "feedenrich/content_extractor.hpp"
#include "oracles.hpp"

using namespace feedenrich;

TEST(DensityProfile, HandCount) {
  auto profile = compute_density_profile("<p>abcde</p><p>xy</p>");
  EXPECT_EQ(profile, (std::vector<TagDensity>{{0, "p", 5}, {1, "p", 2}}));
}

TEST(DensityProfile, ScriptExcluded) {
  auto profile = compute_density_profile("<script>var x=1;</script><p>hi</p>");
  EXPECT_EQ(profile, (std::vector<TagDensity>{{0, "p", 2}}));
}

TEST(DensityProfile, Empty) { EXPECT_TRUE(compute_density_profile("").empty()); }

TEST(DensityProfile, DirectTextOnly) {
  auto profile = compute_density_profile("<div>ab<span>cde</span>  f </div>");
  ASSERT_EQ(profile.size(), 2u);
  EXPECT_EQ(profile[0].char_count, 4u);  // "ab f"
  EXPECT_EQ(profile[1].char_count, 3u);
}

TEST(DensityProfile, InvalidUtf8) { EXPECT_THROW(compute_density_profile("<p>\xff\xfe</p>"), ExtractionError); }

TEST(Threshold, FloorAndRelative) {
  std::vector<TagDensity> small{{0, "p", 100}};
  EXPECT_EQ(density_threshold(small), 20u);
  std::vector<TagDensity> big{{0, "p", 1001}};
  EXPECT_EQ(density_threshold(big), 51u);
}

TEST(Region, SingleNonzeroTag) {
  std::vector<TagDensity> profile{{0, "div", 0}, {1, "p", 120}, {2, "div", 0}};
  auto r = locate_main_region(profile);
  EXPECT_EQ(r.start, 1u);
  EXPECT_EQ(r.end, 1u);
}

TEST(Region, NavParagraphsFooter) {
  std::string html;
  for (int i = 0; i < 12; ++i) html += "<a href=\"/x\">" + std::string(15, 'n') + "</a>";
  for (int i = 0; i < 6; ++i) html += "<p>" + std::string(400, 'b') + "</p>";
  html += "<div>" + std::string(10, 'f') + "</div>";
  auto profile = compute_density_profile(html);
  auto r = locate_main_region(profile);
  EXPECT_EQ(r.start, 12u);
  EXPECT_EQ(r.end, 17u);
  std::vector<std::size_t> chars;
  for (auto& t : profile) chars.push_back(t.char_count);
  auto expected = oracle::best_region(chars, 3);
  ASSERT_TRUE(expected);
  EXPECT_EQ(expected->start, r.start);
  EXPECT_EQ(expected->end, r.end);
}

TEST(Region, EqualTotalsPickEarlier) {
  std::vector<TagDensity> profile;
  auto push = [&](std::size_t c) { profile.push_back({profile.size(), "p", c}); };
  push(100);
  push(100);
  for (int i = 0; i < 5; ++i) push(0);
  push(50);
  push(150);
  auto r = locate_main_region(profile);
  EXPECT_EQ(r.start, 0u);
  EXPECT_EQ(r.end, 1u);
  EXPECT_EQ(r.total_chars, 200u);
}

TEST(Region, GapBoundary) {
  std::vector<TagDensity> profile;
  auto push = [&](std::size_t c) { profile.push_back({profile.size(), "p", c}); };
  push(100);
  for (int i = 0; i < 3; ++i) push(5);
  push(100);
  EXPECT_EQ(locate_main_region(profile).end, 4u);
  profile.insert(profile.begin() + 1, TagDensity{0, "p", 5});
  auto r = locate_main_region(profile);
  EXPECT_EQ(r.start, 0u);
  EXPECT_EQ(r.end, 0u);
}

TEST(Region, RandomProfilesMatchOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 25)(rng);
    std::vector<TagDensity> profile;
    std::vector<std::size_t> chars;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t c = std::uniform_int_distribution<int>(0, 2)(rng) == 0 ? 0
                                                                          : std::uniform_int_distribution<std::size_t>(0, 300)(rng);
      profile.push_back({i, "p", c});
      chars.push_back(c);
    }
    auto expected = oracle::best_region(chars, 3);
    if (!expected) {
      EXPECT_THROW(locate_main_region(profile), NoContentError);
      continue;
    }
    auto r = locate_main_region(profile);
    EXPECT_EQ(r.start, expected->start);
    EXPECT_EQ(r.end, expected->end);
    EXPECT_EQ(r.total_chars, expected->total);
  }
}

TEST(Extract, SimpleArticle) {
  auto region = extract_text_corpus("<article><p>Hello world. This is the article body.</p></article>");
  EXPECT_EQ(region.text, "Hello world. This is the article body.");
}

TEST(Extract, ShortTextIsNoContent) {
  EXPECT_THROW(extract_text_corpus("<article><p>Hello world.</p></article>"), NoContentError);
}

TEST(Extract, OnlyNavLinks) {
  std::string html = "<div>";
  for (int i = 0; i < 40; ++i) html += "<a href=\"/s\">Section " + std::to_string(i) + "</a>";
  html += "</div>";
  EXPECT_THROW(extract_text_corpus(html), NoContentError);
}

TEST(Extract, ParagraphsBecomeLinesAndBoilerplateIsLeftOut) {
  std::string a(120, 'a'), b(130, 'b');
  std::string html = "<nav><p>" + std::string(200, 'n') + "</p></nav><div><p>" + a + "</p><p>x <em>" + b +
                     "</em> y</p></div><footer><p>" + std::string(200, 'f') + "</p></footer>";
  auto region = extract_text_corpus(html);
  EXPECT_EQ(region.text, a + "\nx " + b + " y");
  EXPECT_NE(region.html.find("<p>" + a + "</p>"), std::string::npos);
}
