#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace meshcite::fetcher {

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Transport seam: production code speaks HTTPS, tests plug in a stub.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // path_and_query is everything after the host. Throws NetworkError when no
  // response could be obtained at all.
  virtual HttpResponse get(const std::string& path_and_query) = 0;
};

// HTTPS transport to the public E-utilities host (or any other, for tests).
std::unique_ptr<HttpTransport> make_https_transport(const std::string& host);

// Clock seam so the rate limiter and backoff are testable without waiting.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::milliseconds now() = 0;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

std::unique_ptr<Clock> make_steady_clock();

// Spaces calls so the request rate never exceeds the ceiling. acquire()
// blocks (via the clock) until the next request is allowed.
class RateLimiter {
 public:
  RateLimiter(Clock& clock, double max_per_second);
  void acquire();
  std::chrono::milliseconds interval() const { return interval_; }

 private:
  Clock& clock_;
  std::chrono::milliseconds interval_;
  std::optional<std::chrono::milliseconds> next_allowed_;
};

struct FetchJob {
  std::string query;
  std::optional<std::pair<int, int>> date_range;  // publication years, inclusive
  int page_size = 200;                            // records per saved page, in [1, 10000]
  long start_index = 0;                           // 0-based offset into the result set
  std::filesystem::path output_prefix;            // files are <prefix>N.txt
};

struct SearchResult {
  std::vector<std::string> pmids;  // service order
  long total = 0;                  // service-reported count
};

struct FetchOutcome {
  std::vector<std::filesystem::path> files;
  std::vector<std::size_t> pages_written;
  std::vector<std::string> missing_pmids;  // requested but absent from the response
};

// E-utilities client (esearch + efetch with rettype=medline). Requests are
// sequential, rate-limited (3/s default; an API key raises the ceiling to
// 10/s per NCBI rules), and retried up to max_attempts with exponential
// backoff on network errors and HTTP 429/5xx.
class EutilsClient {
 public:
  struct Options {
    double rate_per_second = 3.0;
    std::string api_key;  // optional
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    std::string tool = "meshcite";
  };

  EutilsClient(HttpTransport& transport, Clock& clock);
  EutilsClient(HttpTransport& transport, Clock& clock, Options options);

  // Full PMID list for the query (paging over retstart internally) plus the
  // service-reported total. A date range appends the PDAT clause.
  SearchResult search_ids(const FetchJob& job);

  // Saves MEDLINE-format pages as <prefix>N.txt, page numbering starting at
  // start_index / page_size + 1, overwriting same-named files. Every page is
  // re-parsed to verify the requested ids came back; throws PartialFetch when
  // pages failed or ids are missing.
  FetchOutcome fetch_medline(const std::vector<std::string>& pmids,
                             const std::filesystem::path& output_prefix, int page_size,
                             long start_index = 0);

 private:
  HttpResponse request(const std::string& path_and_query);

  HttpTransport& transport_;
  Clock& clock_;
  Options options_;
  RateLimiter limiter_;
};

// Default rate for a client: 10/s when an API key is present, else 3/s.
double default_rate_per_second(bool has_api_key);

// Offline mode: previously saved pages <prefix>1.txt, <prefix>2.txt, ... in
// numeric order (gaps allowed, e.g. resumed downloads starting past page 1).
std::vector<std::filesystem::path> list_saved_pages(const std::filesystem::path& output_prefix);

// Percent-encodes a query component.
std::string url_encode(std::string_view text);

// The PDAT clause appended for a publication-year range.
std::string pdat_clause(std::pair<int, int> years);

}  // namespace meshcite::fetcher
