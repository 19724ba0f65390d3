#include "feedenrich/crawler.hpp"

#include <iconv.h>

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "feedenrich/feed_model.hpp"
#include "feedenrich/text_util.hpp"
#include "httplib.h"

namespace feedenrich {

namespace {

using Clock = std::chrono::steady_clock;

std::string media_type(std::string_view content_type) {
  auto semi = content_type.find(';');
  return to_lower_ascii(trim(content_type.substr(0, semi)));
}

std::string charset_of(std::string_view content_type) {
  std::string lower = to_lower_ascii(content_type);
  auto pos = lower.find("charset=");
  if (pos == std::string::npos) return {};
  std::string_view value = std::string_view(lower).substr(pos + 8);
  value = value.substr(0, value.find(';'));
  value = trim(value);
  if (!value.empty() && (value.front() == '"' || value.front() == '\'')) value.remove_prefix(1);
  if (!value.empty() && (value.back() == '"' || value.back() == '\'')) value.remove_suffix(1);
  return std::string(value);
}

bool accepted(const CrawlPolicy& policy, std::string_view content_type) {
  if (policy.accepted_content_types.empty()) return true;
  std::string type = media_type(content_type);
  // Servers that omit Content-Type get the benefit of the doubt.
  if (type.empty()) return true;
  return std::find(policy.accepted_content_types.begin(), policy.accepted_content_types.end(), type) !=
         policy.accepted_content_types.end();
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

bool retryable(const CrawlError& e) {
  return e.kind == CrawlErrorKind::Timeout || e.kind == CrawlErrorKind::ConnectionFailed ||
         (e.kind == CrawlErrorKind::HttpStatus && e.status >= 500);
}

std::string iconv_to_utf8(const std::string& body, const std::string& charset, bool& ok) {
  ok = false;
  iconv_t cd = iconv_open("UTF-8", charset.c_str());
  if (cd == reinterpret_cast<iconv_t>(-1)) return body;
  std::string out(body.size() * 4 + 16, '\0');
  char* in_ptr = const_cast<char*>(body.data());
  std::size_t in_left = body.size();
  char* out_ptr = out.data();
  std::size_t out_left = out.size();
  std::size_t rc = iconv(cd, &in_ptr, &in_left, &out_ptr, &out_left);
  iconv_close(cd);
  if (rc == static_cast<std::size_t>(-1)) return body;
  out.resize(out.size() - out_left);
  ok = true;
  return out;
}

FetchOutcome finish(const Url& original, const Url& final_url, int status, std::string body,
                    std::string content_type, Clock::time_point start) {
  if (status < 200 || status >= 300) {
    return CrawlError{CrawlErrorKind::HttpStatus, status, "HTTP " + std::to_string(status)};
  }
  if (body.empty()) return CrawlError{CrawlErrorKind::EmptyBody, status, "empty response body"};
  FetchResult r;
  r.url = original.str();
  r.final_url = final_url.str();
  r.status = status;
  r.body = decode_body(std::move(body), content_type);
  r.content_type = std::move(content_type);
  r.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  return r;
}

}  // namespace

void CrawlPolicy::validate() const {
  if (max_concurrency == 0 || per_host_limit == 0) throw ConfigError("concurrency limits must be positive");
  if (per_host_limit > max_concurrency) throw ConfigError("per-host limit exceeds global concurrency");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
  if (max_body == 0) throw ConfigError("max body size must be positive");
}

std::string_view to_string(CrawlErrorKind kind) {
  switch (kind) {
    case CrawlErrorKind::InvalidUrl: return "invalid-url";
    case CrawlErrorKind::Timeout: return "timeout";
    case CrawlErrorKind::ConnectionFailed: return "connection-failed";
    case CrawlErrorKind::HttpStatus: return "http-status";
    case CrawlErrorKind::BodyTooLarge: return "body-too-large";
    case CrawlErrorKind::UnsupportedContentType: return "unsupported-content-type";
    case CrawlErrorKind::TooManyRedirects: return "too-many-redirects";
    case CrawlErrorKind::EmptyBody: return "empty-body";
  }
  return "unknown";
}

std::string decode_body(std::string body, std::string_view content_type) {
  std::string charset = charset_of(content_type);
  if (charset.empty() || charset == "utf-8" || charset == "utf8") {
    return is_valid_utf8(body) ? body : latin1_to_utf8(body);
  }
  if (charset == "iso-8859-1" || charset == "latin1" || charset == "us-ascii" ||
      charset == "ascii") {
    return latin1_to_utf8(body);
  }
  bool ok = false;
  std::string converted = iconv_to_utf8(body, charset, ok);
  if (ok) return converted;
  return is_valid_utf8(body) ? body : latin1_to_utf8(body);
}

// --- HttpTransport ---------------------------------------------------------

FetchOutcome HttpTransport::fetch(const Url& url, const CrawlPolicy& policy) const {
  const auto start = Clock::now();
  const auto deadline = start + policy.timeout;
  Url current = url;
  for (std::size_t hop = 0; hop <= policy.max_redirects; ++hop) {
    httplib::Client client(current.scheme + "://" + current.host + ":" + std::to_string(current.effective_port()));
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) return CrawlError{CrawlErrorKind::Timeout, 0, "timed out"};
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(remaining);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(remaining - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_follow_location(false);
    client.set_keep_alive(false);

    httplib::Headers headers = {{"User-Agent", policy.user_agent},
                                {"Accept", "text/html,application/xhtml+xml;q=0.9,*/*;q=0.5"}};
    int status = 0;
    std::string content_type;
    std::string location;
    std::string body;
    bool too_large = false;
    bool wrong_type = false;
    bool timed_out = false;

    auto on_response = [&](const httplib::Response& r) {
      status = r.status;
      content_type = r.get_header_value("Content-Type");
      location = r.get_header_value("Location");
      if (status >= 200 && status < 300) {
        if (!accepted(policy, content_type)) {
          wrong_type = true;
          return false;
        }
        auto length = r.get_header_value_u64("Content-Length");
        if (length > policy.max_body) {
          too_large = true;
          return false;
        }
      }
      return true;
    };
    auto on_data = [&](const char* data, std::size_t len) {
      if (Clock::now() > deadline) {
        timed_out = true;
        return false;
      }
      if (status < 200 || status >= 300) return true;  // error bodies are discarded
      if (body.size() + len > policy.max_body) {
        too_large = true;
        return false;
      }
      body.append(data, len);
      return true;
    };
    auto result = client.Get(current.request_target(), headers, on_response, on_data);
    if (wrong_type) {
      return CrawlError{CrawlErrorKind::UnsupportedContentType, status, "content type '" + content_type + "'"};
    }
    if (too_large) return CrawlError{CrawlErrorKind::BodyTooLarge, status, "body exceeds limit"};
    if (timed_out) return CrawlError{CrawlErrorKind::Timeout, 0, "timed out"};
    if (!result) {
      auto err = result.error();
      // poll() timeouts are rounded to milliseconds, so allow a little slack
      if (err == httplib::Error::ConnectionTimeout || Clock::now() + std::chrono::milliseconds(5) >= deadline) {
        return CrawlError{CrawlErrorKind::Timeout, 0, httplib::to_string(err)};
      }
      return CrawlError{CrawlErrorKind::ConnectionFailed, 0, httplib::to_string(err)};
    }
    if (is_redirect(status) && !location.empty()) {
      auto next = resolve_url(current, location);
      if (!next) return CrawlError{CrawlErrorKind::InvalidUrl, status, "bad redirect target '" + location + "'"};
      current = *next;
      continue;
    }
    return finish(url, current, status, std::move(body), std::move(content_type), start);
  }
  return CrawlError{CrawlErrorKind::TooManyRedirects, 0, "more than " + std::to_string(policy.max_redirects) + " redirects"};
}

// --- DirectoryTransport ----------------------------------------------------

DirectoryTransport::DirectoryTransport(std::filesystem::path root) : root_(std::move(root)) {}

FetchOutcome DirectoryTransport::fetch(const Url& url, const CrawlPolicy& policy) const {
  const auto start = Clock::now();
  bool default_port = url.port == 0 || url.port == (url.scheme == "https" ? 443 : 80);
  std::string host_dir = default_port ? url.host : url.host + ":" + std::to_string(url.port);
  std::string path = url.path;
  if (path.empty() || path.back() == '/') path += "index.html";
  if (path.find("..") != std::string::npos) return CrawlError{CrawlErrorKind::InvalidUrl, 0, "path traversal"};
  std::filesystem::path file = root_ / host_dir / std::filesystem::path(path.substr(1));
  std::ifstream in(file, std::ios::binary);
  if (!in) return CrawlError{CrawlErrorKind::HttpStatus, 404, "HTTP 404"};
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string body = buf.str();
  std::string ext = to_lower_ascii(file.extension().string());
  std::string content_type = (ext == ".html" || ext == ".htm")  ? "text/html; charset=utf-8"
                             : (ext == ".xml" || ext == ".rss") ? "application/rss+xml"
                                                                : "application/octet-stream";
  if (!accepted(policy, content_type)) {
    return CrawlError{CrawlErrorKind::UnsupportedContentType, 200, "content type '" + content_type + "'"};
  }
  if (body.size() > policy.max_body) return CrawlError{CrawlErrorKind::BodyTooLarge, 200, "body exceeds limit"};
  return finish(url, url, 200, std::move(body), std::move(content_type), start);
}

// --- scheduler -------------------------------------------------------------

std::map<std::string, FetchOutcome> crawl_items(const std::vector<std::string>& links, const CrawlPolicy& policy,
                                                const Transport& transport) {
  policy.validate();
  std::map<std::string, FetchOutcome> results;
  struct Job {
    std::string link;
    Url url;
  };
  std::deque<Job> pending;
  std::set<std::string> seen;
  for (const auto& link : links) {
    if (!seen.insert(link).second) continue;
    auto url = parse_url(link);
    if (!url) {
      results.emplace(link, CrawlError{CrawlErrorKind::InvalidUrl, 0, "not an absolute http(s) URL"});
      continue;
    }
    pending.push_back({link, *url});
  }
  if (pending.empty()) return results;

  std::mutex mutex;
  std::condition_variable cv;
  std::map<std::string, std::size_t> in_flight;

  auto worker = [&] {
    std::unique_lock lock(mutex);
    while (true) {
      auto eligible = pending.end();
      cv.wait(lock, [&] {
        if (pending.empty()) return true;
        eligible = std::find_if(pending.begin(), pending.end(),
                                [&](const Job& j) { return in_flight[j.url.host_key()] < policy.per_host_limit; });
        return eligible != pending.end();
      });
      if (pending.empty()) return;
      Job job = std::move(*eligible);
      pending.erase(eligible);
      const std::string host = job.url.host_key();
      ++in_flight[host];
      lock.unlock();

      FetchOutcome outcome = transport.fetch(job.url, policy);
      for (std::size_t attempt = 0; attempt < policy.retries; ++attempt) {
        auto* err = std::get_if<CrawlError>(&outcome);
        if (!err || !retryable(*err)) break;
        outcome = transport.fetch(job.url, policy);
      }

      lock.lock();
      --in_flight[host];
      results.emplace(job.link, std::move(outcome));
      cv.notify_all();
    }
  };

  std::size_t workers = std::min(policy.max_concurrency, pending.size());
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return results;
}

std::map<std::string, FetchOutcome> crawl_items(const std::vector<std::string>& links, const CrawlPolicy& policy) {
  HttpTransport transport;
  return crawl_items(links, policy, transport);
}

}  // namespace feedenrich
