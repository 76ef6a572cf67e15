#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "camscout/crawler.hpp"
#include "camscout/evaluator.hpp"
#include "camscout/identifier.hpp"
#include "camscout/sampler.hpp"
#include "camscout/store.hpp"

// Stage drivers that move records between the store and the library. The
// CLI is a thin shell over these.
namespace camscout {

// Crawls and persists. Throws Error(SeedUnreachable) when the seed page
// itself failed, after the report has been stored.
CrawlReport run_crawl(const std::string& seed, const CrawlConfig& config, Fetcher& fetcher, Clock& clock,
                      Store& store);

struct SampleSummary {
  std::size_t links = 0;
  std::size_t framesets = 0;
  std::size_t dead = 0;
  std::size_t skipped = 0;  // already sampled
};

// Samples every stored Image link that has no frameset yet (all of them
// when `resample`).
SampleSummary run_sample(Store& store, const SampleSchedule& schedule, Clock& clock, Fetcher& fetcher,
                         const SampleOptions& options = {}, bool resample = false);

struct IdentifySummary {
  std::size_t classified = 0;
  std::size_t cameras = 0;
  std::size_t unprobed = 0;
  std::size_t unclassifiable = 0;
};

// Classifies every stored frameset with `cfg` and probes every stream link,
// then updates the camera records.
IdentifySummary run_identify(Store& store, Fetcher& fetcher, Clock& clock, const MethodConfig& cfg,
                             const ProbeOptions& probe = {});

// Ground truth from planted camera URLs, keyed by frameset id.
std::map<std::string, bool> truth_from_urls(const std::vector<std::string>& urls,
                                            const std::vector<FrameSetManifest>& framesets);
std::map<std::string, bool> truth_from_labels(const std::map<std::string, Label>& labels);

struct EvalOptions {
  MethodConfig method;
  bool sweep = false;
  int grid_steps = 200;
};

// Scores each labeled frameset and reports the confusion at the configured
// threshold, plus the PR curve and selected threshold when sweeping.
// Framesets that cannot be scored count as predicted negative with score 0.
// Throws Error(EmptyInput) when no stored frameset has a label.
EvalReport run_eval(const Store& store, const std::map<std::string, bool>& truth, const EvalOptions& options);

// Score a method assigns to one frameset; the threshold rule is score > t.
double method_score(const FrameSet& fs, const MethodConfig& cfg);

}  // namespace camscout
