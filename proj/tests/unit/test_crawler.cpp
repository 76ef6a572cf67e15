#include <doctest.h>

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "camscout/crawler.hpp"
#include "camscout/error.hpp"
#include "camscout/fixture.hpp"

using namespace camscout;
using nlohmann::json;

namespace {

json fixture(const std::string& name) {
  return FixtureFetcher::load_site(std::string(CAMSCOUT_FIXTURE_DIR) + "/" + name + ".json");
}

std::vector<std::string> strings(const json& j) {
  std::vector<std::string> out;
  for (const auto& v : j) out.push_back(v.get<std::string>());
  return out;
}

std::set<std::string> link_keys(const CrawlReport& r) {
  std::set<std::string> out;
  for (const auto& d : r.data_links) out.insert(d.canonical_key);
  return out;
}

std::set<std::string> robots_blocked(const CrawlReport& r) {
  std::set<std::string> out;
  for (const auto& e : r.errors)
    if (e.error == "disallowed by robots.txt") out.insert(e.url);
  return out;
}

}  // namespace

TEST_CASE("fixture crawls produce the expected pages and data links") {
  for (const char* name : {"plain_list", "img_embedded", "xhr_map", "query_string", "off_domain"}) {
    CAPTURE(name);
    const json site = fixture(name);
    VirtualClock clock;
    FixtureFetcher fetcher(clock, site);
    CrawlReport report = crawl(site["seed"], CrawlConfig{}, fetcher, clock);
    const json& expect = site["expect"];

    CHECK(report.visited_pages == strings(expect["pages"]));  // BFS order
    auto want_links = strings(expect["data_links"]);
    CHECK(link_keys(report) == std::set<std::string>(want_links.begin(), want_links.end()));
    auto blocked = strings(expect["robots_blocked"]);
    CHECK(robots_blocked(report) == std::set<std::string>(blocked.begin(), blocked.end()));
    CHECK_FALSE(report.seed_unreachable);
    CHECK(report.unique_pages == static_cast<int>(report.visited_pages.size()));

    // No page outside the seed domain is ever requested, and requests to one
    // domain start at least 3 s apart.
    std::map<std::string, Timestamp> last;
    for (const auto& call : fetcher.calls()) {
      const Url url = Url::parse(call.url);
      CHECK(same_domain(url, report.seed_domain));
      const std::string domain = default_suffix_table().registrable_domain(url.host);
      if (auto it = last.find(domain); it != last.end()) CHECK(call.at - it->second >= Duration{3'000});
      last[domain] = call.at;
    }
    for (const auto& link : report.data_links) {
      CHECK(link.seed_domain == report.seed_domain);
      CHECK(link.depth >= 0);
      CHECK(link.depth <= 15);
    }
  }
}

TEST_CASE("depth cutoff at 15") {
  const json site = fixture("plain_list");
  VirtualClock clock;
  FixtureFetcher fetcher(clock, site);
  CrawlReport report = crawl(site["seed"], CrawlConfig{}, fetcher, clock);
  auto keys = link_keys(report);
  CHECK(keys.count("http://list.test/cam/deep.jpg"));
  CHECK_FALSE(keys.count("http://list.test/cam/too-deep.jpg"));
  CHECK(fetcher.request_count("http://list.test/chain/15") == 1);
  CHECK(fetcher.request_count("http://list.test/chain/16") == 0);
  CHECK(report.per_depth_counts.rbegin()->first == 15);
  for (const auto& d : report.data_links)
    if (d.canonical_key == "http://list.test/cam/deep.jpg") CHECK(d.depth == 15);

  CrawlConfig shallow;
  shallow.max_depth = 1;
  VirtualClock clock2;
  FixtureFetcher fetcher2(clock2, site);
  CrawlReport r1 = crawl(site["seed"], shallow, fetcher2, clock2);
  CHECK(r1.visited_pages.size() == 5);
  CHECK(link_keys(r1).size() == 4);
}

TEST_CASE("ignoring robots reaches the private pages") {
  const json site = fixture("img_embedded");
  VirtualClock clock;
  FixtureFetcher fetcher(clock, site);
  CrawlConfig cfg;
  cfg.respect_robots = false;
  CrawlReport report = crawl(site["seed"], cfg, fetcher, clock);
  CHECK(link_keys(report).count("http://embed.test/cams/secret.jpg"));
  CHECK(fetcher.request_count("http://embed.test/robots.txt") == 0);
}

TEST_CASE("unreachable seed") {
  VirtualClock clock;
  FixtureFetcher fetcher(clock, json{{"resources", {{"http://down.test/", {{"error", "failed"}}}}}});
  CrawlReport report = crawl("http://down.test/", CrawlConfig{}, fetcher, clock);
  CHECK(report.seed_unreachable);
  CHECK(report.data_links.empty());
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].url == "http://down.test/");

  CrawlReport missing = crawl("http://nothing.test/", CrawlConfig{}, fetcher, clock);
  CHECK(missing.seed_unreachable);
}

TEST_CASE("per-page failures are recorded and the crawl goes on") {
  VirtualClock clock;
  FixtureFetcher fetcher(clock, json{{"resources",
                                      {{"http://s.test/", {{"body", R"(<a href=/slow>s</a><a href=/ok>o</a><a href=/old>r</a>)"}}},
                                       {"http://s.test/slow", {{"body", "x"}, {"delay_ms", 200'000}}},
                                       {"http://s.test/ok", {{"body", R"(<img src=/c.jpg>)"}}},
                                       {"http://s.test/old", {{"redirect", "/ok"}}}}}});
  CrawlReport report = crawl("http://s.test/", CrawlConfig{}, fetcher, clock);
  CHECK(link_keys(report) == std::set<std::string>{"http://s.test/c.jpg"});
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].url == "http://s.test/slow");
  // The redirect lands on a page already fetched, so it is not counted twice.
  CHECK(report.visited_pages == std::vector<std::string>{"http://s.test/", "http://s.test/ok"});
}

TEST_CASE("invalid configurations are rejected") {
  VirtualClock clock;
  FixtureFetcher fetcher(clock, json{{"resources", json::object()}});
  CrawlConfig bad;
  bad.max_depth = -1;
  CHECK_THROWS_AS(crawl("http://a.test/", bad, fetcher, clock), Error);
  bad = {};
  bad.max_connections_per_domain = 0;
  CHECK_THROWS_AS(crawl("http://a.test/", bad, fetcher, clock), Error);
  CHECK_THROWS_AS(crawl("rtsp://a.test/", CrawlConfig{}, fetcher, clock), Error);
}

namespace {

struct RandomSite {
  json resources = json::object();
  std::map<int, std::vector<int>> links;  // page -> linked pages
  std::map<int, std::vector<int>> images; // page -> image ids
};

RandomSite random_site(std::mt19937& rng, int pages) {
  RandomSite s;
  std::uniform_int_distribution<int> page(0, pages - 1), fan(0, 3), img(0, 2 * pages);
  for (int p = 0; p < pages; ++p) {
    std::string body;
    for (int n = fan(rng); n > 0; --n) {
      int q = page(rng);
      s.links[p].push_back(q);
      body += "<a href=\"/p/" + std::to_string(q) + "\">x</a>";
    }
    for (int n = fan(rng); n > 0; --n) {
      int i = img(rng);
      s.images[p].push_back(i);
      body += "<img src=\"/i/" + std::to_string(i) + ".jpg?t=" + std::to_string(n) + "\">";
    }
    // Off-domain bait.
    body += "<a href=\"http://elsewhere.test/p/" + std::to_string(p) + "\">y</a>";
    s.resources["http://r.test/p/" + std::to_string(p)] = {{"body", body}};
  }
  return s;
}

}  // namespace

TEST_CASE("property: the crawl equals a depth-bounded BFS over the link graph") {
  std::mt19937 rng(11);
  for (int round = 0; round < 40; ++round) {
    const int pages = 2 + static_cast<int>(rng() % 30);
    RandomSite site = random_site(rng, pages);
    const int max_depth = static_cast<int>(rng() % 6);

    // Oracle BFS.
    std::vector<int> order;
    std::map<int, int> depth{{0, 0}};
    std::deque<int> queue{0};
    std::set<std::string> want_links;
    while (!queue.empty()) {
      int p = queue.front();
      queue.pop_front();
      order.push_back(p);
      for (int i : site.images[p]) want_links.insert("http://r.test/i/" + std::to_string(i) + ".jpg");
      if (depth[p] == max_depth) continue;
      for (int q : site.links[p])
        if (!depth.count(q)) {
          depth[q] = depth[p] + 1;
          queue.push_back(q);
        }
    }
    std::vector<std::string> want_pages;
    for (int p : order) want_pages.push_back("http://r.test/p/" + std::to_string(p));

    for (int workers : {1, 4}) {
      CAPTURE(round);
      CAPTURE(workers);
      VirtualClock clock;
      FixtureFetcher fetcher(clock, json{{"resources", site.resources}});
      CrawlConfig cfg;
      cfg.max_depth = max_depth;
      cfg.workers = workers;
      CrawlReport report = crawl("http://r.test/p/0", cfg, fetcher, clock);
      CHECK(report.visited_pages == want_pages);
      CHECK(link_keys(report) == want_links);
      for (const auto& call : fetcher.calls()) CHECK(Url::parse(call.url).host == "r.test");
    }
  }
}
