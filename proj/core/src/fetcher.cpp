#include "meshcite/fetcher.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "meshcite/errors.hpp"
#include "meshcite/medline.hpp"

namespace meshcite::fetcher {

namespace {

constexpr const char* kEsearchPath = "/entrez/eutils/esearch.fcgi";
constexpr const char* kEfetchPath = "/entrez/eutils/efetch.fcgi";
constexpr int kEsearchPageSize = 10000;  // service maximum per esearch call

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(const std::string& host) : client_("https://" + host) {
    client_.set_connection_timeout(15);
    client_.set_read_timeout(60);
    client_.set_follow_location(true);
  }

  HttpResponse get(const std::string& path_and_query) override {
    auto res = client_.Get(path_and_query);
    if (!res) {
      throw NetworkError("request failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }

 private:
  httplib::Client client_;
};

class SteadyClock : public Clock {
 public:
  std::chrono::milliseconds now() override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now().time_since_epoch());
  }
  void sleep_for(std::chrono::milliseconds d) override { std::this_thread::sleep_for(d); }
};

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

std::unique_ptr<HttpTransport> make_https_transport(const std::string& host) {
  return std::make_unique<HttplibTransport>(host);
}

std::unique_ptr<Clock> make_steady_clock() { return std::make_unique<SteadyClock>(); }

RateLimiter::RateLimiter(Clock& clock, double max_per_second)
    : clock_(clock),
      interval_(static_cast<long>(std::ceil(1000.0 / std::max(0.001, max_per_second)))) {}

void RateLimiter::acquire() {
  auto now = clock_.now();
  if (next_allowed_ && now < *next_allowed_) {
    clock_.sleep_for(*next_allowed_ - now);
    now = *next_allowed_;
  }
  next_allowed_ = now + interval_;
}

double default_rate_per_second(bool has_api_key) { return has_api_key ? 10.0 : 3.0; }

std::string url_encode(std::string_view text) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

std::string pdat_clause(std::pair<int, int> years) {
  return " AND (\"" + std::to_string(years.first) + ".01.01\"[PDAT] : \"" +
         std::to_string(years.second) + ".12.31\"[PDAT])";
}

EutilsClient::EutilsClient(HttpTransport& transport, Clock& clock)
    : EutilsClient(transport, clock, Options{}) {}

EutilsClient::EutilsClient(HttpTransport& transport, Clock& clock, Options options)
    : transport_(transport),
      clock_(clock),
      options_(std::move(options)),
      limiter_(clock, options_.rate_per_second) {}

HttpResponse EutilsClient::request(const std::string& path_and_query) {
  auto backoff = options_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    limiter_.acquire();
    try {
      HttpResponse response = transport_.get(path_and_query);
      if (response.status == 200) {
        return response;
      }
      if (!retryable_status(response.status) || attempt >= options_.max_attempts) {
        if (response.status == 429) {
          throw RateLimited("still throttled after " + std::to_string(attempt) + " attempts");
        }
        throw ServiceError(response.status, response.body.substr(0, 200));
      }
    } catch (const NetworkError&) {
      if (attempt >= options_.max_attempts) {
        throw;
      }
    }
    clock_.sleep_for(backoff);
    backoff *= 2;
  }
}

SearchResult EutilsClient::search_ids(const FetchJob& job) {
  if (job.query.empty()) {
    throw EmptyInput("search query is empty");
  }
  std::string term = job.query;
  if (job.date_range) {
    term += pdat_clause(*job.date_range);
  }

  SearchResult result;
  long retstart = 0;
  while (true) {
    std::string path = std::string(kEsearchPath) + "?db=pubmed&retmode=json&term=" +
                       url_encode(term) + "&retstart=" + std::to_string(retstart) +
                       "&retmax=" + std::to_string(kEsearchPageSize) + "&tool=" + options_.tool;
    if (!options_.api_key.empty()) {
      path += "&api_key=" + url_encode(options_.api_key);
    }
    auto response = request(path);

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(response.status, std::string("unparseable esearch body: ") + e.what());
    }
    if (!j.contains("esearchresult")) {
      throw ServiceError(response.status, "esearch body lacks esearchresult");
    }
    const auto& es = j["esearchresult"];
    result.total = std::stol(es.value("count", "0"));
    std::size_t before = result.pmids.size();
    for (const auto& id : es.value("idlist", nlohmann::json::array())) {
      result.pmids.push_back(id.get<std::string>());
    }
    std::size_t got = result.pmids.size() - before;
    retstart += static_cast<long>(got);
    if (got == 0 || retstart >= result.total) {
      break;
    }
  }
  return result;
}

FetchOutcome EutilsClient::fetch_medline(const std::vector<std::string>& pmids,
                                         const std::filesystem::path& output_prefix,
                                         int page_size, long start_index) {
  if (pmids.empty()) {
    throw EmptyInput("no pmids to fetch");
  }
  if (page_size < 1 || page_size > 10000) {
    throw ConfigError("page_size must lie in [1, 10000]");
  }
  if (start_index < 0) {
    throw ConfigError("start_index must be >= 0");
  }

  FetchOutcome outcome;
  std::vector<std::size_t> failed_pages;

  auto parent = output_prefix.parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }

  for (std::size_t offset = static_cast<std::size_t>(start_index); offset < pmids.size();
       offset += static_cast<std::size_t>(page_size)) {
    std::size_t page_number = offset / static_cast<std::size_t>(page_size) + 1;
    std::size_t end = std::min(pmids.size(), offset + static_cast<std::size_t>(page_size));

    std::string ids;
    for (std::size_t i = offset; i < end; ++i) {
      if (!ids.empty()) {
        ids += ",";
      }
      ids += pmids[i];
    }
    std::string path = std::string(kEfetchPath) +
                       "?db=pubmed&rettype=medline&retmode=text&id=" + url_encode(ids) +
                       "&tool=" + options_.tool;
    if (!options_.api_key.empty()) {
      path += "&api_key=" + url_encode(options_.api_key);
    }

    std::string body;
    try {
      body = request(path).body;
    } catch (const Error&) {
      failed_pages.push_back(page_number);
      continue;
    }

    auto file = output_prefix;
    file += std::to_string(page_number);
    file += ".txt";
    {
      std::ofstream out(file, std::ios::binary | std::ios::trunc);  // same name: overwrite
      if (!out) {
        throw IoFailure("cannot write " + file.string());
      }
      out.write(body.data(), static_cast<std::streamsize>(body.size()));
    }
    outcome.files.push_back(file);
    outcome.pages_written.push_back(page_number);

    // The response must parse with the regular ingest path; any requested id
    // that did not come back is reported.
    auto parsed = medline::parse_medline_text(body);
    std::set<std::string> returned;
    for (const auto& rec : parsed.records) {
      returned.insert(rec.pmid);
    }
    for (std::size_t i = offset; i < end; ++i) {
      if (!returned.contains(pmids[i])) {
        outcome.missing_pmids.push_back(pmids[i]);
      }
    }
  }

  if (!failed_pages.empty() || !outcome.missing_pmids.empty()) {
    throw PartialFetch(outcome.pages_written, outcome.missing_pmids, failed_pages);
  }
  return outcome;
}

std::vector<std::filesystem::path> list_saved_pages(const std::filesystem::path& output_prefix) {
  auto dir = output_prefix.parent_path();
  if (dir.empty()) {
    dir = ".";
  }
  std::string stem = output_prefix.filename().string();

  std::vector<std::pair<unsigned long, std::filesystem::path>> pages;
  if (!std::filesystem::is_directory(dir)) {
    return {};
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) {
      continue;
    }
    std::string name = entry.path().filename().string();
    if (!name.starts_with(stem) || !name.ends_with(".txt")) {
      continue;
    }
    std::string middle = name.substr(stem.size(), name.size() - stem.size() - 4);
    if (middle.empty() ||
        !std::all_of(middle.begin(), middle.end(), [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    pages.emplace_back(std::stoul(middle), entry.path());
  }
  std::sort(pages.begin(), pages.end());
  std::vector<std::filesystem::path> out;
  out.reserve(pages.size());
  for (auto& [number, path] : pages) {
    out.push_back(std::move(path));
  }
  return out;
}

}  // namespace meshcite::fetcher
