#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "feedenrich/url.hpp"

namespace feedenrich {

struct CrawlPolicy {
  std::size_t max_concurrency = 8;
  std::size_t per_host_limit = 2;
  std::chrono::milliseconds timeout{15000};
  std::size_t max_body = 5 * 1024 * 1024;
  std::size_t retries = 1;
  std::string user_agent = "feedenrich/1.0";
  std::size_t max_redirects = 5;
  // Media types accepted for the body; empty accepts anything.
  std::vector<std::string> accepted_content_types = {"text/html", "application/xhtml+xml"};

  // Throws ConfigError when limits are zero or per_host_limit exceeds
  // max_concurrency.
  void validate() const;
};

struct FetchResult {
  std::string url;
  std::string final_url;
  int status = 0;
  std::string body;  // UTF-8
  std::string content_type;
  std::chrono::milliseconds elapsed{0};
};

enum class CrawlErrorKind {
  InvalidUrl,
  Timeout,
  ConnectionFailed,
  HttpStatus,
  BodyTooLarge,
  UnsupportedContentType,
  TooManyRedirects,
  EmptyBody,
};

std::string_view to_string(CrawlErrorKind kind);

struct CrawlError {
  CrawlErrorKind kind = CrawlErrorKind::ConnectionFailed;
  int status = 0;  // HTTP status for HttpStatus errors
  std::string message;
};

using FetchOutcome = std::variant<FetchResult, CrawlError>;

// Performs one logical GET (following redirects). Implementations must be
// safe to call from several threads at once.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual FetchOutcome fetch(const Url& url, const CrawlPolicy& policy) const = 0;
};

// HTTP/HTTPS over cpp-httplib.
class HttpTransport final : public Transport {
 public:
  FetchOutcome fetch(const Url& url, const CrawlPolicy& policy) const override;
};

// Serves URLs from a local mirror: http://host:port/a/b.html maps to
// <root>/host:port/a/b.html (or <root>/host/... when the port is the
// default); paths ending in '/' map to index.html. Missing files are 404s.
class DirectoryTransport final : public Transport {
 public:
  explicit DirectoryTransport(std::filesystem::path root);
  FetchOutcome fetch(const Url& url, const CrawlPolicy& policy) const override;

 private:
  std::filesystem::path root_;
};

// Fetches every distinct link once, never running more than
// max_concurrency requests in total or per_host_limit against one host.
// Failures are recorded per link. Blocks until all fetches settle.
std::map<std::string, FetchOutcome> crawl_items(const std::vector<std::string>& links, const CrawlPolicy& policy,
                                                const Transport& transport);
std::map<std::string, FetchOutcome> crawl_items(const std::vector<std::string>& links, const CrawlPolicy& policy = {});

// Decodes `body` to UTF-8 using the charset parameter of `content_type`
// (UTF-8 when absent or unknown).
std::string decode_body(std::string body, std::string_view content_type);

}  // namespace feedenrich
