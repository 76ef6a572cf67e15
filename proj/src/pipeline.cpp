#include "camscout/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "camscout/error.hpp"

namespace camscout {

CrawlReport run_crawl(const std::string& seed, const CrawlConfig& config, Fetcher& fetcher, Clock& clock,
                      Store& store) {
  CrawlReport report = crawl(seed, config, fetcher, clock);
  const std::size_t added = store.put_crawl_report(report);
  spdlog::info("crawl {}: {} pages, {} data links ({} new)", seed, report.unique_pages, report.data_links.size(),
               added);
  if (report.seed_unreachable) {
    const std::string why = report.errors.empty() ? "unknown error" : report.errors.front().error;
    throw Error(ErrorKind::SeedUnreachable, seed + ": " + why);
  }
  return report;
}

SampleSummary run_sample(Store& store, const SampleSchedule& schedule, Clock& clock, Fetcher& fetcher,
                         const SampleOptions& options, bool resample) {
  SampleSummary summary;
  std::vector<DataLink> todo;
  for (auto& link : store.data_links()) {
    if (link.kind != LinkKind::Image) continue;
    ++summary.links;
    if (!resample && store.get_frameset_manifest(link_id(link.canonical_key))) {
      ++summary.skipped;
      continue;
    }
    todo.push_back(std::move(link));
  }
  auto outcomes = sample_links(todo, schedule, clock, fetcher, options);
  for (auto& outcome : outcomes) {
    if (outcome.frameset) {
      store.put_frameset(*outcome.frameset);
      ++summary.framesets;
    } else {
      spdlog::warn("{}", outcome.error.value_or("sampling failed"));
      ++summary.dead;
    }
  }
  return summary;
}

namespace {

std::vector<std::string> present_checksums(const FrameSetManifest& m) {
  std::vector<std::string> refs;
  for (const auto& f : m.frames)
    if (f) refs.push_back(f->checksum);
  return refs;
}

}  // namespace

IdentifySummary run_identify(Store& store, Fetcher& fetcher, Clock& clock, const MethodConfig& cfg,
                             const ProbeOptions& probe_options) {
  cfg.validate();
  IdentifySummary summary;
  auto tally = [&](const ClassificationResult& r, const std::vector<std::string>& refs) {
    store.put_classification(r);
    store.record_verdict(r, refs, clock.now());
    ++summary.classified;
    summary.cameras += r.is_camera;
    summary.unprobed += r.verdict == Verdict::Unprobed;
    summary.unclassifiable += r.verdict == Verdict::Unclassifiable;
  };

  for (const auto& manifest : store.list_framesets()) {
    ClassificationResult r;
    try {
      r = classify(store.load_frameset(manifest.id), cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientFrames && e.kind() != ErrorKind::Unclassifiable) throw;
      r.link = manifest.link;
      r.method = cfg.method;
      r.verdict = Verdict::Unclassifiable;
      r.note = e.what();
    }
    tally(r, present_checksums(manifest));
  }

  for (const auto& link : store.data_links()) {
    if (link.kind != LinkKind::Stream) continue;
    ClassificationResult r;
    std::vector<std::string> refs;
    try {
      StreamProbe probe = probe_stream(link, fetcher, probe_options);
      r = classify_stream(link, probe, nullptr, cfg);
      if (!probe.frames.empty()) {
        refs.push_back(store.put_frame_bytes(probe.frames.front()));
        if (probe.frames.size() > 1) refs.push_back(store.put_frame_bytes(probe.frames.back()));
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::StreamUnreachable && e.kind() != ErrorKind::PlaylistMalformed) throw;
      r.link = link;
      r.method = Method::StreamCheck;
      r.verdict = Verdict::Unclassifiable;
      r.note = e.what();
    }
    tally(r, refs);
  }
  return summary;
}

std::map<std::string, bool> truth_from_urls(const std::vector<std::string>& urls,
                                            const std::vector<FrameSetManifest>& framesets) {
  std::set<std::string> planted;
  for (const auto& u : urls) {
    auto url = Url::try_parse(u);
    if (!url) throw Error(ErrorKind::MalformedUrl, "planted camera '" + u + "'");
    planted.insert(link_id(canonicalize(*url, classify_link(*url).kind)));
  }
  std::map<std::string, bool> truth;
  for (const auto& m : framesets) truth[m.id] = planted.count(m.id) > 0;
  return truth;
}

std::map<std::string, bool> truth_from_labels(const std::map<std::string, Label>& labels) {
  std::map<std::string, bool> truth;
  for (const auto& [id, label] : labels) truth[id] = label == Label::NetworkCamera;
  return truth;
}

double method_score(const FrameSet& fs, const MethodConfig& cfg) {
  try {
    return classify(fs, cfg).score;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientFrames && e.kind() != ErrorKind::Unclassifiable) throw;
    return 0.0;
  }
}

EvalReport run_eval(const Store& store, const std::map<std::string, bool>& truth, const EvalOptions& options) {
  options.method.validate();
  const double threshold = options.method.method == Method::Checksum ? 0.0
                           : options.method.method == Method::PercentDiff ? options.method.percent_threshold
                                                                          : options.method.luminance_threshold;
  std::vector<double> scores;
  std::vector<bool> labels;
  for (const auto& [id, is_camera] : truth) {
    if (!store.get_frameset_manifest(id)) continue;
    scores.push_back(method_score(store.load_frameset(id), options.method));
    labels.push_back(is_camera);
  }
  if (scores.empty()) throw Error(ErrorKind::EmptyInput, "no stored frameset has a label");

  std::vector<bool> predictions;
  predictions.reserve(scores.size());
  for (double s : scores) predictions.push_back(s > threshold);
  EvalReport report = compute_metrics(predictions, labels);
  report.method = std::string(to_string(options.method.method));
  if (options.sweep) {
    report.pr_curve = threshold_sweep(scores, labels, default_grid(scores, options.grid_steps));
    try {
      report.selected_threshold = select_threshold(report.pr_curve);
    } catch (const Error& e) {
      spdlog::warn("{}", e.what());
    }
  }
  return report;
}

}  // namespace camscout
