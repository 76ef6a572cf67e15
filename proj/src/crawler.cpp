#include "camscout/crawler.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "camscout/error.hpp"
#include "camscout/politeness.hpp"
#include "camscout/robots.hpp"

namespace camscout {

void CrawlConfig::validate() const {
  if (max_depth < 0) throw Error(ErrorKind::InvalidConfig, "max_depth must be >= 0");
  if (max_connections_per_domain < 1)
    throw Error(ErrorKind::InvalidConfig, "max_connections_per_domain must be >= 1");
  if (per_request_delay.count() <= 0 || page_timeout.count() <= 0 || render_wait.count() <= 0)
    throw Error(ErrorKind::InvalidConfig, "durations must be positive");
  if (workers < 1) throw Error(ErrorKind::InvalidConfig, "workers must be >= 1");
}

namespace {

// Robots rules per origin, fetched on first use.
class RobotsCache {
 public:
  RobotsCache(Fetcher& fetcher, FetchOptions options) : fetcher_(fetcher), options_(options) {}

  RobotsRules get(const Url& url) {
    const std::string origin = url.origin();
    {
      std::lock_guard lock(mu_);
      if (auto it = rules_.find(origin); it != rules_.end()) return it->second;
    }
    // Fetched outside the lock; a racing worker may fetch the same file,
    // only the first result is kept.
    RobotsRules rules = robots_rules(url, fetcher_, options_);
    std::lock_guard lock(mu_);
    return rules_.emplace(origin, std::move(rules)).first->second;
  }

  std::optional<Duration> known_delay(const Url& url) const {
    std::lock_guard lock(mu_);
    auto it = rules_.find(url.origin());
    if (it == rules_.end()) return std::nullopt;
    return it->second.crawl_delay();
  }

 private:
  Fetcher& fetcher_;
  FetchOptions options_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, RobotsRules> rules_;
};

struct FrontierEntry {
  Url url;
  std::string key;
};

struct PageOutcome {
  bool requested = false;
  bool skipped = false;  // already fetched via a redirect
  std::optional<std::string> error;
  std::string final_key;
  Timestamp fetched_at{};
  ExtractionResult links;
};

}  // namespace

CrawlReport crawl(const std::string& seed_url, const CrawlConfig& config, Fetcher& fetcher, Clock& clock) {
  config.validate();
  const Url seed = Url::parse(seed_url);
  if (!seed.is_http()) throw Error(ErrorKind::MalformedUrl, "seed must be an http(s) URL: " + seed_url);

  CrawlReport report;
  report.seed_url = seed.to_string();
  report.seed_domain = default_suffix_table().registrable_domain(seed.host);

  PolitenessGate gate(clock, config.max_connections_per_domain);
  std::unique_ptr<RobotsCache> robots;
  PoliteFetcher polite(fetcher, gate, [&](const Url& url) {
    Duration delay = config.per_request_delay;
    if (robots)
      if (auto robots_delay = robots->known_delay(url)) delay = std::max(delay, *robots_delay);
    return delay;
  });
  const FetchOptions options{config.page_timeout, config.render_wait};
  if (config.respect_robots) robots = std::make_unique<RobotsCache>(polite, options);

  auto allowed = [&](const Url& url) {
    return !robots || robots->get(url).is_allowed(url.path_and_query());
  };

  std::set<std::string> enqueued;
  std::set<std::string> fetched;
  std::mutex fetched_mu;
  std::unordered_map<std::string, std::size_t> data_index;

  std::vector<FrontierEntry> level;
  const std::string seed_key = canonicalize(seed, LinkKind::Page);
  level.push_back({Url::parse(seed_key), seed_key});
  enqueued.insert(seed_key);

  auto visit = [&](const FrontierEntry& entry) {
    PageOutcome out;
    {
      std::lock_guard lock(fetched_mu);
      if (fetched.count(entry.key)) {
        out.skipped = true;
        return out;
      }
    }
    if (!allowed(entry.url)) {
      out.error = "disallowed by robots.txt";
      return out;
    }
    out.requested = true;
    try {
      RenderedPage page = fetch_following_redirects(
          polite, entry.url, options, config.max_redirects,
          [&](const Url& target) { return same_domain(target, report.seed_domain) && allowed(target); });
      if (page.is_redirect()) {
        out.error = "redirect target dropped: " + page.location.value_or("");
      } else if (!page.ok()) {
        out.error = "HTTP " + std::to_string(page.status);
      } else {
        out.final_key = canonicalize(Url::parse(page.url), LinkKind::Page);
        out.fetched_at = page.fetched_at == Timestamp{} ? clock.now() : page.fetched_at;
        out.links = extract_all(page, config.classify);
      }
    } catch (const Error& e) {
      out.error = e.what();
    }
    return out;
  };

  for (int depth = 0; !level.empty() && depth <= config.max_depth; ++depth) {
    std::vector<FrontierEntry> next;

    auto merge = [&](const FrontierEntry& entry, PageOutcome& out) {
      if (out.skipped) return true;
      if (out.requested) ++report.pages_crawled;
      if (out.error) {
        report.errors.push_back({entry.url.to_string(), *out.error});
        if (depth == 0) {
          spdlog::warn("seed {} unreachable: {}", report.seed_url, *out.error);
          report.seed_unreachable = true;
          return false;
        }
        return true;
      }
      {
        std::lock_guard lock(fetched_mu);
        fetched.insert(entry.key);
        if (!fetched.insert(out.final_key).second && out.final_key != entry.key) return true;
      }
      enqueued.insert(out.final_key);
      ++report.unique_pages;
      report.visited_pages.push_back(out.final_key);
      DepthCount& counts = report.per_depth_counts[depth];
      ++counts.pages;
      for (DataLink link : out.links.data_links) {
        if (data_index.count(link.canonical_key)) continue;
        link.depth = depth;
        link.seed_domain = report.seed_domain;
        link.discovered_at = out.fetched_at;
        data_index.emplace(link.canonical_key, report.data_links.size());
        report.data_links.push_back(std::move(link));
        ++counts.data_links;
      }
      if (depth < config.max_depth) {
        for (const auto& page_key : out.links.page_links) {
          auto url = Url::try_parse(page_key);
          if (!url || !url->is_http() || !same_domain(*url, report.seed_domain)) continue;
          if (enqueued.insert(page_key).second) next.push_back({*url, page_key});
        }
      }
      return true;
    };

    if (config.workers == 1) {
      for (const auto& entry : level) {
        PageOutcome out = visit(entry);
        if (!merge(entry, out)) return report;
      }
    } else {
      std::vector<PageOutcome> outcomes(level.size());
      std::atomic<std::size_t> cursor{0};
      {
        std::vector<std::jthread> pool;
        const int n = std::min<int>(config.workers, static_cast<int>(level.size()));
        for (int w = 0; w < n; ++w) {
          pool.emplace_back([&] {
            for (std::size_t i = cursor++; i < level.size(); i = cursor++) outcomes[i] = visit(level[i]);
          });
        }
      }
      for (std::size_t i = 0; i < level.size(); ++i)
        if (!merge(level[i], outcomes[i])) return report;
    }
    level = std::move(next);
  }
  return report;
}

}  // namespace camscout
