#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "feedenrich/feed_io.hpp"
#include "feedenrich/pipeline.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace feedenrich;

namespace {

const fs::path kFixtures = FIXTURE_DIR;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("feedenrich_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "feedenrich");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    out_ = out.str();
    err_ = err.str();
    return code;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string model() {
    if (!fs::exists(path("model.txt"))) {
      EXPECT_EQ(run({"train", "--corpus", (kFixtures / "train.tsv").string(), "--model", path("model.txt")}), 0);
    }
    return path("model.txt");
  }

  int enhance(const std::string& feed, const std::string& output, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"enhance",  "--input",   (kFixtures / "feeds" / feed).string(),
                                     "--output", output,      "--no-network",
                                     "--site-dir", (kFixtures / "site").string(), "--model", model(),
                                     "--stock-db", (kFixtures / "stock.tsv").string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  }

  fs::path dir_;
  std::string out_, err_;
};

}  // namespace

TEST_F(PipelineTest, EnhancesExcerptOnlyFeed) {
  ASSERT_EQ(enhance("degraded.xml", path("out.xml"), {"--report-out", path("report.json")}), 0) << err_;
  auto feed = parse_feed(oracle::read_file(path("out.xml")));
  ASSERT_EQ(feed.items.size(), 12u);
  for (const auto& item : feed.items) {
    EXPECT_TRUE(item.content_text && item.content_text->size() > 1000);
    EXPECT_EQ(item.origin(ItemField::Content), Provenance::Extracted);
    EXPECT_EQ(item.origin(ItemField::Description), Provenance::Original);
    EXPECT_FALSE(item.keywords.empty());
  }
  auto report = nlohmann::json::parse(oracle::read_file(path("report.json")));
  EXPECT_GT(report["after"]["Average Item Quality"].get<double>(), report["before"]["Average Item Quality"].get<double>());
  EXPECT_NE(err_.find("item 0 content: extracted"), std::string::npos);
}

TEST_F(PipelineTest, CompleteFeedUnchanged) {
  ASSERT_EQ(enhance("complete.xml", path("out.xml")), 0) << err_;
  auto in = parse_feed(oracle::read_file((kFixtures / "feeds/complete.xml").string()));
  auto out = parse_feed(oracle::read_file(path("out.xml")));
  EXPECT_EQ(in, out);
  for (const auto& item : out.items) {
    for (const auto& [field, origin] : item.provenance) EXPECT_EQ(origin, Provenance::Original);
  }
}

TEST_F(PipelineTest, DeadLinkCarriedThrough) {
  ASSERT_EQ(enhance("deadlink.xml", path("out.xml")), 0) << err_;
  auto in = parse_feed(oracle::read_file((kFixtures / "feeds/deadlink.xml").string()));
  auto out = parse_feed(oracle::read_file(path("out.xml")));
  ASSERT_EQ(out.items.size(), 10u);
  std::size_t enhanced = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    if (out.items[i].origin(ItemField::Content) == Provenance::Extracted) {
      ++enhanced;
    } else {
      EXPECT_EQ(out.items[i], in.items[i]);
    }
  }
  EXPECT_EQ(enhanced, 9u);
  EXPECT_NE(err_.find("item 9 crawl: warning"), std::string::npos);
}

TEST_F(PipelineTest, Idempotent) {
  ASSERT_EQ(enhance("degraded.xml", path("once.xml")), 0);
  std::vector<std::string> args = {"enhance", "--input", path("once.xml"), "--output", path("twice.xml"),
                                   "--no-network", "--site-dir", (kFixtures / "site").string(), "--model", model(),
                                   "--stock-db", (kFixtures / "stock.tsv").string()};
  ASSERT_EQ(run(args), 0) << err_;
  EXPECT_EQ(oracle::read_file(path("once.xml")), oracle::read_file(path("twice.xml")));
}

TEST_F(PipelineTest, OriginalFieldsSurvive) {
  auto in = parse_feed(oracle::read_file((kFixtures / "feeds/wild.xml").string()));
  ASSERT_EQ(enhance("wild.xml", path("out.xml")), 3);  // none of its pages exist
  EXPECT_FALSE(fs::exists(path("out.xml")));
  ASSERT_EQ(enhance("degraded.xml", path("out.xml")), 0);
  auto before = parse_feed(oracle::read_file((kFixtures / "feeds/degraded.xml").string()));
  auto after = parse_feed(oracle::read_file(path("out.xml")));
  for (std::size_t i = 0; i < before.items.size(); ++i) {
    EXPECT_EQ(after.items[i].title, before.items[i].title);
    EXPECT_EQ(after.items[i].content_html, before.items[i].content_html);
    EXPECT_EQ(after.items[i].published, before.items[i].published);
    EXPECT_EQ(after.items[i].link, before.items[i].link);
  }
}

namespace {

class BrokenProvider final : public ImageProvider {
 public:
  bool enabled() const override { throw std::runtime_error("provider misconfigured"); }
  std::optional<StockImage> query(const ImageProviderQuery&) const override { return std::nullopt; }
};

}  // namespace

TEST_F(PipelineTest, StageFailureStaysWithItem) {
  auto feed = parse_feed(oracle::read_file((kFixtures / "feeds/degraded.xml").string()));
  DirectoryTransport transport(kFixtures / "site");
  BrokenProvider provider;
  EnhanceContext context;
  context.transport = &transport;
  context.provider = &provider;
  std::vector<std::string> log;
  context.log = [&](std::string_view line) { log.emplace_back(line); };
  auto result = enhance_feed(feed, {}, context);
  std::size_t failed = 0;
  for (const auto& l : log) failed += l.find("image: failed: provider misconfigured") != std::string::npos;
  EXPECT_GT(failed, 0u);
  EXPECT_EQ(result.stats.stage_failures, failed);
  for (const auto& item : result.feed.items) {
    EXPECT_EQ(item.origin(ItemField::Content), Provenance::Extracted);
    EXPECT_TRUE(item.author);
  }
  EXPECT_EQ(result.stats.images_extracted, feed.items.size() - failed);
}

TEST_F(PipelineTest, TrainDeterministic) {
  ASSERT_EQ(run({"train", "--corpus", (kFixtures / "train.tsv").string(), "--model", path("a.txt")}), 0);
  ASSERT_EQ(run({"train", "--corpus", (kFixtures / "train.tsv").string(), "--model", path("b.txt")}), 0);
  EXPECT_EQ(oracle::read_file(path("a.txt")), oracle::read_file(path("b.txt")));
}

TEST_F(PipelineTest, TrainErrors) {
  EXPECT_EQ(run({"train", "--corpus", path("missing.tsv"), "--model", path("m.txt")}), 2);
  {
    std::ofstream out(path("one.tsv"));
    out << "sport\tgoal match league\nsport\tstriker goal\n";
  }
  EXPECT_EQ(run({"train", "--corpus", path("one.tsv"), "--model", path("m.txt")}), 4);
  EXPECT_NE(err_.find("training error"), std::string::npos);
}

TEST_F(PipelineTest, Report) {
  ASSERT_EQ(run({"report", "--input", (kFixtures / "feeds/degraded.xml").string()}), 0);
  auto j = nlohmann::json::parse(out_);
  EXPECT_EQ(j["Items"], 12);
  EXPECT_DOUBLE_EQ(j["Average Item Quality"].get<double>(), 0.17);
  for (auto key : {"Average Content Length", "Articles with Images", "Articles with Categories", "Articles with Author",
                   "Average Item Quality"}) {
    EXPECT_TRUE(j.contains(key));
  }
  ASSERT_EQ(run({"report", "--input", (kFixtures / "feeds/empty.xml").string()}), 0);
  j = nlohmann::json::parse(out_);
  EXPECT_EQ(j["Items"], 0);
  EXPECT_EQ(j["Average Item Quality"], 0.0);
  EXPECT_EQ(run({"report", "--input", (kFixtures / "feeds/degraded.xml").string(), "--weights", "10,10,10,10,10,10"}),
            2);
}

TEST_F(PipelineTest, InputErrors) {
  EXPECT_EQ(run({"enhance", "--input", path("nope.xml"), "--output", path("o.xml"), "--no-network", "--site-dir",
                 (kFixtures / "site").string()}),
            2);
  {
    std::ofstream out(path("bad.xml"));
    out << "<rss><channel>";
  }
  EXPECT_EQ(run({"enhance", "--input", path("bad.xml"), "--output", path("o.xml"), "--no-network", "--site-dir",
                 (kFixtures / "site").string()}),
            2);
  EXPECT_EQ(run({"enhance", "--input", path("bad.xml")}), 2);
  EXPECT_EQ(run({"bogus"}), 2);
}

TEST_F(PipelineTest, EmptyFeedHasNothingToCrawl) {
  EXPECT_EQ(enhance("empty.xml", path("out.xml"), {"--report-out", path("r.json")}), 3);
  EXPECT_TRUE(fs::exists(path("r.json")));
}

TEST_F(PipelineTest, ConfigFileAndOverrides) {
  {
    std::ofstream out(path("cfg.ini"));
    out << "keywords=3\nper-host=1\n";
  }
  ASSERT_EQ(enhance("degraded.xml", path("out.xml"), {"--config", path("cfg.ini")}), 0) << err_;
  for (const auto& item : parse_feed(oracle::read_file(path("out.xml"))).items) EXPECT_EQ(item.keywords.size(), 3u);
  ASSERT_EQ(enhance("degraded.xml", path("out.xml"), {"--config", path("cfg.ini"), "--keywords", "5"}), 0);
  for (const auto& item : parse_feed(oracle::read_file(path("out.xml"))).items) EXPECT_EQ(item.keywords.size(), 5u);
  {
    std::ofstream out(path("bad.ini"));
    out << "no-such-option=1\n";
  }
  EXPECT_EQ(enhance("degraded.xml", path("out.xml"), {"--config", path("bad.ini")}), 2);
}

TEST_F(PipelineTest, BadPolicyIsAConfigError) {
  EXPECT_EQ(enhance("degraded.xml", path("out.xml"), {"--concurrency", "1", "--per-host", "2"}), 2);
  EXPECT_EQ(enhance("degraded.xml", path("out.xml"), {"--weights", "1,1,1,1,1,1"}), 2);
}
