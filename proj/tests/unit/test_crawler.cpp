#include <gtest/gtest.h>

#include <filesystem>

#include "feedenrich/crawler.hpp"
#include "feedenrich/feed_model.hpp"
#include "fixture_server.hpp"

using namespace feedenrich;

namespace {

CrawlPolicy fast_policy() {
  CrawlPolicy p;
  p.timeout = std::chrono::milliseconds(3000);
  return p;
}

}  // namespace

TEST(CrawlPolicy, Validation) {
  CrawlPolicy p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.max_concurrency, 8u);
  EXPECT_EQ(p.per_host_limit, 2u);
  EXPECT_EQ(p.timeout, std::chrono::seconds(15));
  EXPECT_EQ(p.max_body, 5u * 1024 * 1024);
  EXPECT_EQ(p.retries, 1u);
  p.per_host_limit = 9;
  EXPECT_THROW(p.validate(), ConfigError);
  p.per_host_limit = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Crawl, DuplicatesFetchedOnce) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(1));
  auto u = server.url("/ok/1"), v = server.url("/ok/2");
  auto results = crawl_items({u, u, v}, fast_policy());
  EXPECT_EQ(results.size(), 2u);
  EXPECT_EQ(counters.hits.size(), 2u);
  for (auto& [k, n] : counters.hits) EXPECT_EQ(n, 1) << k;
}

TEST(Crawl, SequentialWithConcurrencyOne) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(20));
  CrawlPolicy p = fast_policy();
  p.max_concurrency = 1;
  p.per_host_limit = 1;
  crawl_items({server.url("/ok/1"), server.url("/ok/2"), server.url("/ok/3")}, p);
  ASSERT_EQ(counters.events.size(), 6u);
  for (std::size_t i = 0; i < 6; i += 2) {
    EXPECT_EQ(counters.events[i].rfind("begin ", 0), 0u);
    EXPECT_EQ(counters.events[i + 1], "end " + counters.events[i].substr(6));
  }
  EXPECT_EQ(counters.peak, 1);
}

TEST(Crawl, FailureIsIsolated) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(1));
  auto results = crawl_items({server.url("/missing/1"), server.url("/ok/2")}, fast_policy());
  auto* err = std::get_if<CrawlError>(&results.at(server.url("/missing/1")));
  ASSERT_TRUE(err);
  EXPECT_EQ(err->kind, CrawlErrorKind::HttpStatus);
  EXPECT_EQ(err->status, 404);
  auto* ok = std::get_if<FetchResult>(&results.at(server.url("/ok/2")));
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
  EXPECT_FALSE(ok->body.empty());
}

TEST(Crawl, ServerErrorsAreRetried) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(1));
  auto results = crawl_items({server.url("/boom/1")}, fast_policy());
  EXPECT_EQ(std::get<CrawlError>(results.begin()->second).status, 500);
  EXPECT_EQ(counters.hits.begin()->second, 2);
}

TEST(Crawl, RejectsNonHtml) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(1));
  auto results = crawl_items({server.url("/image/1")}, fast_policy());
  EXPECT_EQ(std::get<CrawlError>(results.begin()->second).kind, CrawlErrorKind::UnsupportedContentType);
}

TEST(Crawl, BodyLimit) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(1));
  CrawlPolicy p = fast_policy();
  p.max_body = 1000;
  auto results = crawl_items({server.url("/big/1")}, p);
  EXPECT_EQ(std::get<CrawlError>(results.begin()->second).kind, CrawlErrorKind::BodyTooLarge);
}

TEST(Crawl, Timeout) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(30));  // /slow sleeps 600 ms
  CrawlPolicy p = fast_policy();
  p.timeout = std::chrono::milliseconds(150);
  p.retries = 0;
  auto results = crawl_items({server.url("/slow/1")}, p);
  EXPECT_EQ(std::get<CrawlError>(results.begin()->second).kind, CrawlErrorKind::Timeout);
}

TEST(Crawl, FollowsRedirects) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(1));
  auto results = crawl_items({server.url("/redirect/7")}, fast_policy());
  auto& r = std::get<FetchResult>(results.begin()->second);
  EXPECT_EQ(r.final_url, server.url("/ok/7"));
  EXPECT_EQ(r.url, server.url("/redirect/7"));
}

TEST(Crawl, ConnectionRefused) {
  int port;
  {
    fixture::Counters counters;
    fixture::Server server(counters, std::chrono::milliseconds(1));
    port = server.port();
  }
  auto results = crawl_items({"http://127.0.0.1:" + std::to_string(port) + "/ok/1"}, fast_policy());
  EXPECT_EQ(std::get<CrawlError>(results.begin()->second).kind, CrawlErrorKind::ConnectionFailed);
}

TEST(Crawl, InvalidUrl) {
  auto results = crawl_items({"not a url", "ftp://x.test/a"}, fast_policy());
  ASSERT_EQ(results.size(), 2u);
  for (auto& [k, v] : results) EXPECT_EQ(std::get<CrawlError>(v).kind, CrawlErrorKind::InvalidUrl);
}

TEST(Crawl, CharsetDecoding) {
  fixture::Counters counters;
  fixture::Server server(counters, std::chrono::milliseconds(1));
  auto results = crawl_items({server.url("/latin/1")}, fast_policy());
  EXPECT_EQ(std::get<FetchResult>(results.begin()->second).body, "<p>caf\xc3\xa9</p>");
}

TEST(DecodeBody, Charsets) {
  EXPECT_EQ(decode_body("caf\xc3\xa9", "text/html"), "caf\xc3\xa9");
  EXPECT_EQ(decode_body("caf\xe9", "text/html; charset=ISO-8859-1"), "caf\xc3\xa9");
  EXPECT_EQ(decode_body("caf\xe9", "text/html; charset=\"windows-1252\""), "caf\xc3\xa9");
  EXPECT_EQ(decode_body("\x93hi\x94", "text/html; charset=windows-1252"), "\xe2\x80\x9chi\xe2\x80\x9d");
  EXPECT_EQ(decode_body("\x93hi\x94", "text/html;charset=cp1252"), "\xe2\x80\x9chi\xe2\x80\x9d");
}

TEST(DirectoryTransport, MapsHostAndPath) {
  auto root = std::filesystem::path(FIXTURE_DIR) / "site";
  DirectoryTransport transport(root);
  CrawlPolicy p;
  auto ok = transport.fetch(*parse_url("http://news.example.test/2024/03/defeat-after-world-cup-victory.html"), p);
  ASSERT_TRUE(std::holds_alternative<FetchResult>(ok));
  auto missing = transport.fetch(*parse_url("http://news.example.test/nope.html"), p);
  EXPECT_EQ(std::get<CrawlError>(missing).status, 404);
  auto escape = transport.fetch(*parse_url("http://news.example.test/a/%2e%2e/b"), p);
  EXPECT_TRUE(std::holds_alternative<CrawlError>(escape));
}
