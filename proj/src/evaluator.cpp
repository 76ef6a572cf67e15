#include "camscout/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "camscout/error.hpp"

namespace camscout {

std::string_view to_string(Label label) {
  return label == Label::NetworkCamera ? "NetworkCamera" : "OtherWebAsset";
}

Label label_from_string(std::string_view text) {
  if (text == "NetworkCamera") return Label::NetworkCamera;
  if (text == "OtherWebAsset") return Label::OtherWebAsset;
  throw Error(ErrorKind::InvalidConfig, "unknown label '" + std::string(text) + "'");
}

void check_label_protocol(const FrameSet& fs, Label label) {
  if (label != Label::NetworkCamera) return;
  const Frame* first = nullptr;
  for (const auto& f : fs.frames) {
    if (!f) continue;
    if (!first) first = &*f;
    else if (f->checksum != first->checksum) return;
  }
  throw Error(ErrorKind::LabelRejected,
              "frames of " + fs.link.raw_url + " never changed; it cannot be labeled NetworkCamera");
}

EvalReport compute_metrics(const std::vector<bool>& predictions, const std::vector<bool>& labels) {
  if (predictions.size() != labels.size())
    throw Error(ErrorKind::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                               std::to_string(labels.size()) + " labels");
  if (predictions.empty()) throw Error(ErrorKind::EmptyInput, "no samples");
  EvalReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i]) (labels[i] ? r.tp : r.fp)++;
    else (labels[i] ? r.fn : r.tn)++;
  }
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(r.total());
  return r;
}

std::vector<PrPoint> threshold_sweep(const std::vector<double>& scores, const std::vector<bool>& labels,
                                     std::vector<double> grid) {
  if (scores.size() != labels.size())
    throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
  if (scores.empty() || grid.empty()) throw Error(ErrorKind::EmptyInput, "empty scores or grid");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<PrPoint> curve;
  curve.reserve(grid.size());
  std::vector<bool> predictions(scores.size());
  for (double t : grid) {
    for (std::size_t i = 0; i < scores.size(); ++i) predictions[i] = scores[i] > t;
    EvalReport m = compute_metrics(predictions, labels);
    curve.push_back({t, m.precision, m.recall});
  }
  return curve;
}

std::vector<double> default_grid(const std::vector<double>& scores, int steps) {
  if (scores.empty()) return {};
  auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  std::vector<double> grid(scores);
  if (steps > 1 && *hi > *lo) {
    for (int i = 0; i < steps; ++i)
      grid.push_back(*lo + (*hi - *lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double select_threshold(const std::vector<PrPoint>& curve) {
  const PrPoint* best = nullptr;
  double best_min = 0, best_f1 = 0;
  for (const auto& p : curve) {
    if (!p.precision || !p.recall) continue;
    const double lo = std::min(*p.precision, *p.recall);
    const double sum = *p.precision + *p.recall;
    const double f1 = sum > 0 ? 2 * *p.precision * *p.recall / sum : 0.0;
    bool better = !best || lo > best_min || (lo == best_min && f1 > best_f1) ||
                  (lo == best_min && f1 == best_f1 && p.threshold < best->threshold);
    if (better) {
      best = &p;
      best_min = lo;
      best_f1 = f1;
    }
  }
  if (!best) throw Error(ErrorKind::NoValidPoint, "no curve point has both precision and recall");
  return best->threshold;
}

namespace {

volatile std::size_t benchmark_sink = 0;

bool run_checksum(const FrameSet& fs) {
  std::optional<Md5Digest> first;
  bool changed = false;
  for (const auto& f : fs.frames) {
    if (!f) continue;
    Md5Digest d = md5(f->bytes);
    if (!first) first = d;
    else if (d != *first) changed = true;
  }
  return changed;
}

// Re-decodes the present frames so pixel methods pay their real cost.
FrameSet decoded_copy(const FrameSet& fs, bool only_first_and_last) {
  FrameSet copy;
  copy.schedule = fs.schedule;
  copy.frames.resize(fs.frames.size());
  auto last = fs.last_present();
  for (std::size_t i = 0; i < fs.frames.size(); ++i) {
    if (!fs.frames[i]) continue;
    if (only_first_and_last && i != 0 && (!last || i != *last)) continue;
    Frame f;
    f.checksum = fs.frames[i]->checksum;
    try {
      f.pixels = decode_grayscale(fs.frames[i]->bytes);
    } catch (const Error&) {
    }
    copy.frames[i] = std::move(f);
  }
  return copy;
}

bool run_method(const FrameSet& fs, const MethodConfig& cfg) {
  try {
    switch (cfg.method) {
      case Method::Checksum: return run_checksum(fs);
      case Method::PercentDiff: return percent_score(decoded_copy(fs, false)) > cfg.percent_threshold;
      case Method::LuminanceDiff:
        return luminance_score(decoded_copy(fs, true), cfg.luminance_fallback_to_latest) > cfg.luminance_threshold;
      case Method::Cascade:
        return run_checksum(fs) &&
               luminance_score(decoded_copy(fs, true), cfg.luminance_fallback_to_latest) > cfg.luminance_threshold;
      case Method::StreamCheck: return false;
    }
  } catch (const Error&) {
  }
  return false;
}

}  // namespace

std::vector<MethodTiming> benchmark_methods(const std::vector<FrameSet>& framesets, const std::vector<Method>& methods,
                                            int repetitions, const MethodConfig& base,
                                            const std::function<std::chrono::steady_clock::time_point()>& now) {
  if (repetitions < 1) throw Error(ErrorKind::InvalidConfig, "repetitions must be >= 1");
  std::vector<MethodTiming> out;
  for (Method m : methods) {
    MethodConfig cfg = base;
    cfg.method = m;
    MethodTiming timing;
    timing.method = m;
    std::size_t cameras = 0;
    for (int rep = 0; rep < repetitions; ++rep) {
      auto start = now();
      for (const auto& fs : framesets) cameras += run_method(fs, cfg);
      auto stop = now();
      timing.samples_s.push_back(std::chrono::duration<double>(stop - start).count());
    }
    const double n = static_cast<double>(timing.samples_s.size());
    timing.mean_s = std::accumulate(timing.samples_s.begin(), timing.samples_s.end(), 0.0) / n;
    double ss = 0;
    for (double s : timing.samples_s) ss += (s - timing.mean_s) * (s - timing.mean_s);
    timing.stddev_s = timing.samples_s.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    benchmark_sink = cameras;
    out.push_back(std::move(timing));
  }
  return out;
}

}  // namespace camscout
