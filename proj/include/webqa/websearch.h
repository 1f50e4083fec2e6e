#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "webqa/corpus.h"

namespace webqa {

struct SearchConfig {
  std::string endpoint;          // e.g. http://host:port/search
  std::string api_key;           // supplied via environment, never a flag
  int results_per_query = 100;   // in [1, 100]
  double rate_limit = 1.0;       // queries per second, > 0
  std::filesystem::path cache_dir;
  int max_retries = 3;
  int concurrency = 4;

  // Loads everything except the api key from a JSON file.
  static SearchConfig load(const std::filesystem::path& path);
  void validate() const;
};

class WebSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuotaExceededError : public WebSearchError {
 public:
  using WebSearchError::WebSearchError;
};

class AuthError : public WebSearchError {
 public:
  using WebSearchError::WebSearchError;
};

// Injectable clock so the rate limiter is testable without waiting.
class Clock {
 public:
  using TimePoint = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual TimePoint now() = 0;
  virtual void sleep_until(TimePoint t) = 0;
};

class SystemClock : public Clock {
 public:
  TimePoint now() override { return std::chrono::steady_clock::now(); }
  void sleep_until(TimePoint t) override;
};

// Spaces request starts at least 1/qps apart, shared across threads.
class RateLimiter {
 public:
  RateLimiter(double queries_per_second, Clock* clock);
  void acquire();

 private:
  std::chrono::nanoseconds interval_;
  Clock* clock_;
  std::mutex mutex_;
  Clock::TimePoint next_slot_;
  bool first_ = true;
};

// Returns the raw payload for one query. Payload format:
//   {"results": [{"title": ..., "body": ...}, ...]}
class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual std::string search_raw(const std::string& question, int count) = 0;
};

// HTTP GET <endpoint>?q=<question>&count=<count> with the api key sent as a
// bearer token. 401/403 raise AuthError, 429 QuotaExceededError; 5xx and
// transport failures are retried with exponential backoff.
class HttpSearchBackend : public SearchBackend {
 public:
  explicit HttpSearchBackend(const SearchConfig& config, Clock* clock = nullptr);
  std::string search_raw(const std::string& question, int count) override;

 private:
  SearchConfig config_;
  Clock* clock_;
  std::unique_ptr<Clock> owned_clock_;
};

// Parses a payload into ranked snippets (rank = 1-based position). Structured
// answer boxes or any non-organic entries are ignored.
ResultSet parse_result_payload(const std::string& payload, int max_results);

// Content-addressed payload cache: key is a hash of the normalized question;
// writes are atomic (temp then rename).
class SnippetCache {
 public:
  explicit SnippetCache(std::filesystem::path dir);
  std::optional<std::string> get(const std::string& question) const;
  void put(const std::string& question, const std::string& payload) const;
  static std::string key_for(const std::string& question);

 private:
  std::filesystem::path dir_;
};

// Cache-first snippet retrieval with rate limiting and bounded retries.
class SnippetFetcher {
 public:
  SnippetFetcher(const SearchConfig& config, SearchBackend* backend, Clock* clock = nullptr);

  ResultSet fetch_result_set(const std::string& question);
  bool cached(const std::string& question) const { return cache_.get(question).has_value(); }

 private:
  std::string fetch_payload(const std::string& question);

  SearchConfig config_;
  SearchBackend* backend_;
  std::unique_ptr<Clock> owned_clock_;
  Clock* clock_;
  SnippetCache cache_;
  RateLimiter limiter_;
};

struct ScrapeInput {
  std::string id;
  std::string question;
  std::vector<std::string> answers;  // may be empty for unlabeled questions
};

// Line-delimited {"id", "question", "answers"?} records.
std::vector<ScrapeInput> load_scrape_inputs(const std::filesystem::path& path);

struct ScrapeStats {
  int fetched = 0;
  int from_cache = 0;
  int failed = 0;
};

// Fetches every question (bounded concurrency, resumable through the cache)
// and writes the corpus file atomically. Per-question failures are reported
// and skipped; the run continues.
ScrapeStats build_dataset(const std::vector<ScrapeInput>& inputs, const SearchConfig& config,
                          SearchBackend* backend, const std::filesystem::path& out_path,
                          Clock* clock = nullptr,
                          const std::function<void(const std::string&)>& log = {});

}  // namespace webqa
