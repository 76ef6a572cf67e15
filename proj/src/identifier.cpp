#include "camscout/identifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "camscout/error.hpp"
#include "camscout/kernels.hpp"

namespace camscout {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Checksum: return "Checksum";
    case Method::PercentDiff: return "PercentDiff";
    case Method::LuminanceDiff: return "LuminanceDiff";
    case Method::Cascade: return "Cascade";
    case Method::StreamCheck: return "StreamCheck";
  }
  return "LuminanceDiff";
}

Method method_from_string(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "checksum") return Method::Checksum;
  if (t == "percent" || t == "percentdiff") return Method::PercentDiff;
  if (t == "luminance" || t == "luminancediff") return Method::LuminanceDiff;
  if (t == "cascade") return Method::Cascade;
  if (t == "streamcheck" || t == "stream") return Method::StreamCheck;
  throw Error(ErrorKind::InvalidConfig, "unknown method '" + std::string(text) + "'");
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Classified: return "Classified";
    case Verdict::Unprobed: return "Unprobed";
    case Verdict::Unclassifiable: return "Unclassifiable";
  }
  return "Classified";
}

Verdict verdict_from_string(std::string_view text) {
  if (text == "Classified") return Verdict::Classified;
  if (text == "Unprobed") return Verdict::Unprobed;
  if (text == "Unclassifiable") return Verdict::Unclassifiable;
  throw Error(ErrorKind::InvalidConfig, "unknown verdict '" + std::string(text) + "'");
}

void MethodConfig::validate() const {
  if (percent_threshold < 0 || percent_threshold > 1)
    throw Error(ErrorKind::InvalidConfig, "percent_threshold must lie in [0,1]");
  if (luminance_threshold < 0) throw Error(ErrorKind::InvalidConfig, "luminance_threshold must be >= 0");
}

double percent_diff(const GrayImage& a, const GrayImage& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyImage, "percent_diff on empty image");
  if (a.width != b.width || a.height != b.height || a.size() != b.size())
    throw Error(ErrorKind::DimensionMismatch, std::to_string(a.width) + "x" + std::to_string(a.height) +
                                                  " vs " + std::to_string(b.width) + "x" +
                                                  std::to_string(b.height));
  return static_cast<double>(kernels::count_changed(a.view(), b.view())) / static_cast<double>(a.size());
}

double luminance_diff(const GrayImage& a, const GrayImage& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyImage, "luminance_diff on empty image");
  const double mean_a = static_cast<double>(kernels::sum(a.view())) / static_cast<double>(a.size());
  const double mean_b = static_cast<double>(kernels::sum(b.view())) / static_cast<double>(b.size());
  return std::abs(mean_a - mean_b);
}

bool checksum_changed(const FrameSet& fs) {
  const Frame* reference = nullptr;
  std::size_t present = 0;
  bool changed = false;
  for (const auto& frame : fs.frames) {
    if (!frame) continue;
    ++present;
    if (!reference) {
      reference = &*frame;
    } else if (frame->checksum != reference->checksum) {
      changed = true;
    }
  }
  if (present < 2) throw Error(ErrorKind::InsufficientFrames, "checksum needs two present frames");
  return changed;
}

namespace {

const GrayImage& first_decoded(const FrameSet& fs) {
  if (fs.frames.empty() || !fs.frames[0] || !fs.frames[0]->decode_ok())
    throw Error(ErrorKind::InsufficientFrames, "frame t0 missing or undecodable");
  return *fs.frames[0]->pixels;
}

bool same_dims(const GrayImage& a, const GrayImage& b) { return a.width == b.width && a.height == b.height; }

std::vector<Duration> present_offsets(const FrameSet& fs) {
  std::vector<Duration> used;
  for (std::size_t i = 0; i < fs.frames.size(); ++i)
    if (fs.frames[i] && i < fs.schedule.offsets.size()) used.push_back(fs.schedule.offsets[i]);
  return used;
}

std::size_t luminance_partner(const FrameSet& fs, bool fallback) {
  const std::size_t last = fs.frames.size() - 1;
  if (last > 0 && fs.frames[last] && fs.frames[last]->decode_ok()) return last;
  if (fallback) {
    for (std::size_t i = last; i > 0; --i)
      if (fs.frames[i] && fs.frames[i]->decode_ok()) return i;
  }
  throw Error(ErrorKind::InsufficientFrames, "no decoded frame to compare against t0");
}

}  // namespace

double percent_score(const FrameSet& fs) {
  const GrayImage& base = first_decoded(fs);
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < fs.frames.size(); ++i) {
    const auto& frame = fs.frames[i];
    if (!frame || !frame->decode_ok()) continue;
    total += same_dims(base, *frame->pixels) ? percent_diff(base, *frame->pixels) : 1.0;
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::InsufficientFrames, "no later decoded frame");
  return total / static_cast<double>(n);
}

double luminance_score(const FrameSet& fs, bool fallback_to_latest) {
  const GrayImage& base = first_decoded(fs);
  const std::size_t partner = luminance_partner(fs, fallback_to_latest);
  return luminance_diff(base, *fs.frames[partner]->pixels);
}

std::vector<std::optional<std::size_t>> pixel_change_counts(const FrameSet& fs) {
  std::vector<std::optional<std::size_t>> counts;
  const GrayImage* base = (!fs.frames.empty() && fs.frames[0] && fs.frames[0]->decode_ok())
                              ? &*fs.frames[0]->pixels
                              : nullptr;
  for (std::size_t i = 1; i < fs.frames.size(); ++i) {
    const auto& frame = fs.frames[i];
    if (base && frame && frame->decode_ok() && same_dims(*base, *frame->pixels))
      counts.push_back(kernels::count_changed(base->view(), frame->pixels->view()));
    else
      counts.push_back(std::nullopt);
  }
  return counts;
}

ClassificationResult classify(const FrameSet& fs, const MethodConfig& cfg) {
  cfg.validate();
  if (fs.present_count() == 0)
    throw Error(ErrorKind::Unclassifiable, "no frames were captured for " + fs.link.raw_url);
  ClassificationResult r;
  r.link = fs.link;
  r.method = cfg.method;
  switch (cfg.method) {
    case Method::Checksum: {
      r.is_camera = checksum_changed(fs);
      r.score = r.is_camera ? 1.0 : 0.0;
      r.threshold = 0.0;
      r.frames_used = present_offsets(fs);
      break;
    }
    case Method::PercentDiff: {
      r.score = percent_score(fs);
      r.threshold = cfg.percent_threshold;
      r.is_camera = r.score > r.threshold;
      for (std::size_t i = 0; i < fs.frames.size(); ++i)
        if (fs.frames[i] && fs.frames[i]->decode_ok()) r.frames_used.push_back(fs.schedule.offsets[i]);
      break;
    }
    case Method::LuminanceDiff: {
      r.score = luminance_score(fs, cfg.luminance_fallback_to_latest);
      r.threshold = cfg.luminance_threshold;
      r.is_camera = r.score > r.threshold;
      r.frames_used = {fs.schedule.offsets[0],
                       fs.schedule.offsets[luminance_partner(fs, cfg.luminance_fallback_to_latest)]};
      break;
    }
    case Method::Cascade: {
      r.threshold = cfg.luminance_threshold;
      if (!checksum_changed(fs)) {
        r.score = 0.0;
        r.is_camera = false;
        r.frames_used = present_offsets(fs);
        r.note = "bytes never changed";
        break;
      }
      r.score = luminance_score(fs, cfg.luminance_fallback_to_latest);
      r.is_camera = r.score > r.threshold;
      r.frames_used = {fs.schedule.offsets[0],
                       fs.schedule.offsets[luminance_partner(fs, cfg.luminance_fallback_to_latest)]};
      break;
    }
    case Method::StreamCheck:
      throw Error(ErrorKind::InvalidConfig, "StreamCheck applies to stream links; use classify_stream");
  }
  return r;
}

}  // namespace camscout
