#include "camscout/robots.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <spdlog/spdlog.h>

#include "camscout/error.hpp"
#include "camscout/fetcher.hpp"

namespace camscout {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Group {
  std::vector<std::string> agents;
  std::vector<RobotsRules::Rule> rules;
  std::optional<Duration> delay;
};

bool match_from(std::string_view pattern, std::string_view path) {
  // Iterative wildcard matcher; '$' only anchors at the end of the pattern.
  std::size_t p = 0, s = 0;
  std::size_t star = std::string_view::npos, mark = 0;
  const bool anchored = pattern.ends_with('$');
  if (anchored) pattern.remove_suffix(1);
  while (s < path.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = s;
    } else if (p < pattern.size() && pattern[p] == path[s]) {
      ++p;
      ++s;
    } else if (p == pattern.size() && !anchored) {
      return true;  // prefix match complete
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

bool robots_pattern_matches(std::string_view pattern, std::string_view path) {
  if (pattern.empty()) return false;
  return match_from(pattern, path);
}

RobotsRules RobotsRules::parse(std::string_view text, std::string_view user_agent) {
  std::vector<Group> groups;
  bool last_was_agent = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    std::string key = lower(trim(line.substr(0, colon)));
    std::string_view value = trim(line.substr(colon + 1));
    if (key == "user-agent") {
      if (!last_was_agent || groups.empty()) groups.emplace_back();
      groups.back().agents.push_back(lower(value));
      last_was_agent = true;
      continue;
    }
    last_was_agent = false;
    if (groups.empty()) continue;  // rules before any user-agent line are ignored
    if (key == "disallow") {
      if (!value.empty()) groups.back().rules.push_back({std::string(value), false});
    } else if (key == "allow") {
      if (!value.empty()) groups.back().rules.push_back({std::string(value), true});
    } else if (key == "crawl-delay") {
      try {
        groups.back().delay = parse_duration(value);
      } catch (const Error&) {
        spdlog::debug("ignoring bad crawl-delay '{}'", value);
      }
    }
  }

  const std::string ua = lower(user_agent);
  auto select = [&](bool wildcard) {
    RobotsRules rules;
    bool found = false;
    for (const auto& g : groups) {
      bool hit = std::any_of(g.agents.begin(), g.agents.end(), [&](const std::string& a) {
        return wildcard ? a == "*" : (a != "*" && !a.empty() && ua.find(a) != std::string::npos);
      });
      if (!hit) continue;
      found = true;
      rules.rules_.insert(rules.rules_.end(), g.rules.begin(), g.rules.end());
      if (g.delay) rules.crawl_delay_ = std::max(rules.crawl_delay_.value_or(Duration{0}), *g.delay);
    }
    return std::make_pair(found, rules);
  };
  if (auto [found, rules] = select(false); found) return rules;
  return select(true).second;
}

bool RobotsRules::is_allowed(std::string_view path_and_query) const {
  if (path_and_query.empty()) path_and_query = "/";
  const Rule* best = nullptr;
  for (const auto& rule : rules_) {
    if (!robots_pattern_matches(rule.pattern, path_and_query)) continue;
    if (!best || rule.pattern.size() > best->pattern.size() ||
        (rule.pattern.size() == best->pattern.size() && rule.allow && !best->allow))
      best = &rule;
  }
  return best == nullptr || best->allow;
}

RobotsRules robots_rules(const Url& any_url_on_host, Fetcher& fetcher, const FetchOptions& options,
                         std::string_view user_agent) {
  Url robots_url = Url::parse(any_url_on_host.origin() + "/robots.txt");
  try {
    RenderedPage page = fetch_following_redirects(fetcher, robots_url, options);
    if (!page.ok()) return RobotsRules::allow_all();
    return RobotsRules::parse(page.html, user_agent);
  } catch (const Error& e) {
    spdlog::info("robots.txt for {} unavailable ({}); using defaults", robots_url.to_string(), e.what());
    return RobotsRules::allow_all();
  }
}

}  // namespace camscout
