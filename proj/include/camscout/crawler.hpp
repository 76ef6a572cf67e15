#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "camscout/clock.hpp"
#include "camscout/extractor.hpp"
#include "camscout/fetcher.hpp"
#include "camscout/linkmodel.hpp"

namespace camscout {

struct CrawlConfig {
  int max_depth = 15;
  int max_connections_per_domain = 32;
  Duration per_request_delay{3'000};
  Duration page_timeout{180'000};
  Duration render_wait{8'000};
  bool respect_robots = true;
  int workers = 1;  // 1 gives a fully deterministic crawl
  int max_redirects = 5;
  ClassifyOptions classify;

  void validate() const;  // throws Error(InvalidConfig)
};

struct DepthCount {
  int pages = 0;
  int data_links = 0;
  friend bool operator==(const DepthCount&, const DepthCount&) = default;
};

struct CrawlError {
  std::string url;
  std::string error;
  friend bool operator==(const CrawlError&, const CrawlError&) = default;
};

struct CrawlReport {
  std::string seed_url;
  std::string seed_domain;
  int pages_crawled = 0;  // page requests issued, failures included
  int unique_pages = 0;   // distinct pages fetched successfully
  std::vector<DataLink> data_links;
  std::map<int, DepthCount> per_depth_counts;
  std::vector<CrawlError> errors;
  std::vector<std::string> visited_pages;  // canonical keys, in fetch order
  bool seed_unreachable = false;
};

// Breadth-first, depth-bounded crawl of the seed's registrable domain.
// Every request (robots.txt included) passes the per-domain politeness gate.
// A seed that cannot be fetched yields an empty report with
// seed_unreachable set and the failure in errors.
CrawlReport crawl(const std::string& seed_url, const CrawlConfig& config, Fetcher& fetcher, Clock& clock);

}  // namespace camscout
