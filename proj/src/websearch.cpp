#include "webqa/websearch.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "webqa/annotate.h"

namespace webqa {

using nlohmann::json;

SearchConfig SearchConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open search config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("search config " + path.string() + ": " + e.what());
  }
  SearchConfig config;
  config.endpoint = j.at("endpoint").get<std::string>();
  config.results_per_query = j.value("results_per_query", 100);
  config.rate_limit = j.value("rate_limit", 1.0);
  config.cache_dir = j.value("cache_dir", std::string("search_cache"));
  config.max_retries = j.value("max_retries", 3);
  config.concurrency = j.value("concurrency", 4);
  config.validate();
  return config;
}

void SearchConfig::validate() const {
  if (endpoint.empty()) throw std::invalid_argument("search config: endpoint is required");
  if (results_per_query < 1 || results_per_query > 100)
    throw std::invalid_argument("search config: results_per_query must be in [1, 100]");
  if (rate_limit <= 0) throw std::invalid_argument("search config: rate_limit must be > 0");
}

void SystemClock::sleep_until(TimePoint t) { std::this_thread::sleep_until(t); }

RateLimiter::RateLimiter(double queries_per_second, Clock* clock)
    : interval_(std::chrono::nanoseconds(
          static_cast<std::int64_t>(1e9 / queries_per_second))),
      clock_(clock) {}

void RateLimiter::acquire() {
  Clock::TimePoint slot;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto now = clock_->now();
    if (first_) {
      slot = now;
      first_ = false;
    } else {
      slot = std::max(now, next_slot_);
    }
    next_slot_ = slot + interval_;
  }
  clock_->sleep_until(slot);
}

namespace {

// Splits "http://host:port/path" into (host-with-scheme, path).
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  std::size_t scheme = endpoint.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const std::size_t slash = endpoint.find('/', host_start);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::string strip_html(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_tag = false;
  for (char c : text) {
    if (c == '<') {
      in_tag = true;
      continue;
    }
    if (c == '>') {
      in_tag = false;
      continue;
    }
    if (!in_tag) out += c;
  }
  return out;
}

}  // namespace

HttpSearchBackend::HttpSearchBackend(const SearchConfig& config, Clock* clock)
    : config_(config), clock_(clock) {
  if (!clock_) {
    owned_clock_ = std::make_unique<SystemClock>();
    clock_ = owned_clock_.get();
  }
}

std::string HttpSearchBackend::search_raw(const std::string& question, int count) {
  const auto [host, path] = split_endpoint(config_.endpoint);
  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);

  httplib::Params params{{"q", question}, {"count", std::to_string(count)}};
  httplib::Headers headers;
  if (!config_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto backoff = std::chrono::milliseconds(500LL << (attempt - 1));
      clock_->sleep_until(clock_->now() + backoff);
    }
    auto res = client.Get(path, params, headers);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    if (res->status == 401 || res->status == 403)
      throw AuthError("search auth failed (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 429)
      throw QuotaExceededError("search quota exceeded (HTTP 429)");
    last_error = "HTTP " + std::to_string(res->status);
    if (res->status < 500) break;  // non-retryable client error
  }
  throw WebSearchError("search failed for '" + question + "' after " +
                       std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

ResultSet parse_result_payload(const std::string& payload, int max_results) {
  json j;
  try {
    j = json::parse(payload);
  } catch (const json::exception& e) {
    throw WebSearchError(std::string("malformed search payload: ") + e.what());
  }
  if (!j.is_object() || !j.contains("results") || !j["results"].is_array())
    throw WebSearchError("search payload has no results array");

  ResultSet rs;
  int rank = 0;
  for (const auto& r : j["results"]) {
    if (!r.is_object()) continue;
    if (r.value("type", "organic") != "organic") continue;  // skip answer boxes etc.
    if (rank >= max_results) break;
    Snippet s;
    s.title = strip_html(r.value("title", ""));
    s.body = strip_html(r.value("body", ""));
    s.rank = ++rank;
    rs.snippets.push_back(std::move(s));
  }
  return rs;
}

SnippetCache::SnippetCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string SnippetCache::key_for(const std::string& question) {
  // FNV-1a over the canonical question text; stable across platforms.
  const std::string norm = canonical_form(question);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : norm) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

std::optional<std::string> SnippetCache::get(const std::string& question) const {
  const auto path = dir_ / (key_for(question) + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void SnippetCache::put(const std::string& question, const std::string& payload) const {
  const auto path = dir_ / (key_for(question) + ".json");
  const auto tmp = dir_ / (key_for(question) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw WebSearchError("cannot write cache file: " + tmp.string());
    out << payload;
  }
  std::filesystem::rename(tmp, path);
}

SnippetFetcher::SnippetFetcher(const SearchConfig& config, SearchBackend* backend, Clock* clock)
    : config_(config),
      backend_(backend),
      owned_clock_(clock ? nullptr : std::make_unique<SystemClock>()),
      clock_(clock ? clock : owned_clock_.get()),
      cache_(config.cache_dir),
      limiter_(config.rate_limit, clock_) {}

std::string SnippetFetcher::fetch_payload(const std::string& question) {
  if (auto cached = cache_.get(question)) return *cached;
  limiter_.acquire();
  std::string payload = backend_->search_raw(question, config_.results_per_query);
  cache_.put(question, payload);
  return payload;
}

ResultSet SnippetFetcher::fetch_result_set(const std::string& question) {
  return parse_result_payload(fetch_payload(question), config_.results_per_query);
}

std::vector<ScrapeInput> load_scrape_inputs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open questions file: " + path.string());
  std::vector<ScrapeInput> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("questions file line " + std::to_string(lineno) + ": " +
                               e.what());
    }
    ScrapeInput input;
    input.id = j.at("id").get<std::string>();
    input.question = j.at("question").get<std::string>();
    if (j.contains("answers")) input.answers = j["answers"].get<std::vector<std::string>>();
    if (input.answers.empty())
      throw std::runtime_error("questions file line " + std::to_string(lineno) +
                               ": answers are required to build a corpus record");
    out.push_back(std::move(input));
  }
  return out;
}

ScrapeStats build_dataset(const std::vector<ScrapeInput>& inputs, const SearchConfig& config,
                          SearchBackend* backend, const std::filesystem::path& out_path,
                          Clock* clock, const std::function<void(const std::string&)>& log) {
  SnippetFetcher fetcher(config, backend, clock);
  ScrapeStats stats;

  std::vector<std::optional<ResultSet>> results(inputs.size());
  std::vector<std::string> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> fetched{0}, from_cache{0}, failed{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      const bool was_cached = fetcher.cached(inputs[i].question);
      try {
        results[i] = fetcher.fetch_result_set(inputs[i].question);
        (was_cached ? from_cache : fetched).fetch_add(1);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        failed.fetch_add(1);
      }
      if (log) {
        std::lock_guard<std::mutex> lock(log_mutex);
        log("[" + std::to_string(i + 1) + "/" + std::to_string(inputs.size()) + "] " +
            inputs[i].id + (errors[i].empty() ? "" : " FAILED: " + errors[i]));
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(config.concurrency,
                                                  static_cast<int>(inputs.size())));
  std::vector<std::thread> threads;
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  std::vector<Example> examples;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!results[i] || inputs[i].answers.empty()) continue;
    Example ex;
    ex.id = inputs[i].id;
    ex.question = inputs[i].question;
    ex.gold_answers = inputs[i].answers;
    ex.result_set = std::move(*results[i]);
    examples.push_back(std::move(ex));
  }
  store_dataset(out_path, examples);

  stats.fetched = fetched.load();
  stats.from_cache = from_cache.load();
  stats.failed = failed.load();
  return stats;
}

}  // namespace webqa
