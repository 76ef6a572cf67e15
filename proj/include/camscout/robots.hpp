#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camscout/clock.hpp"

namespace camscout {

class Fetcher;
struct FetchOptions;
struct Url;

// The robots.txt group that applies to one user agent. Rules use the common
// longest-match semantics with '*' wildcards and '$' anchors; on equal length
// Allow wins.
class RobotsRules {
 public:
  struct Rule {
    std::string pattern;
    bool allow = false;
  };

  static RobotsRules allow_all() { return RobotsRules{}; }
  static RobotsRules parse(std::string_view text, std::string_view user_agent);

  bool is_allowed(std::string_view path_and_query) const;
  std::optional<Duration> crawl_delay() const { return crawl_delay_; }
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
  std::optional<Duration> crawl_delay_;
};

inline constexpr std::string_view kUserAgentToken = "camscout";

// Fetches <origin>/robots.txt through `fetcher`. Missing files, non-2xx
// answers and transport errors all give permissive defaults.
RobotsRules robots_rules(const Url& any_url_on_host, Fetcher& fetcher, const FetchOptions& options,
                         std::string_view user_agent = kUserAgentToken);

// Pattern match for a single rule (exposed for tests).
bool robots_pattern_matches(std::string_view pattern, std::string_view path);

}  // namespace camscout
