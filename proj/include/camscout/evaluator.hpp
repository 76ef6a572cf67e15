#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camscout/clock.hpp"
#include "camscout/identifier.hpp"
#include "camscout/sampler.hpp"

namespace camscout {

enum class Label { NetworkCamera, OtherWebAsset };
std::string_view to_string(Label label);
Label label_from_string(std::string_view text);

struct LabeledSample {
  std::string frameset_id;
  Label label = Label::OtherWebAsset;
  std::string labeler;
  Timestamp labeled_at{};
  std::size_t pixel_change_count = 0;  // shown to the labeler

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

// Labeling protocol: frames whose bytes never changed from t0 cannot be a
// Network Camera. Throws Error(LabelRejected).
void check_label_protocol(const FrameSet& fs, Label label);

struct PrPoint {
  double threshold = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct EvalReport {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> precision;  // absent when tp + fp == 0
  std::optional<double> recall;     // absent when tp + fn == 0
  double accuracy = 0.0;
  std::vector<PrPoint> pr_curve;
  std::optional<double> selected_threshold;
  std::string method;

  std::size_t total() const { return tp + fp + fn + tn; }
};

// Throws Error(LengthMismatch) or Error(EmptyInput).
EvalReport compute_metrics(const std::vector<bool>& predictions, const std::vector<bool>& labels);

// prediction = score > t for each grid threshold. The grid is sorted and
// de-duplicated first.
std::vector<PrPoint> threshold_sweep(const std::vector<double>& scores, const std::vector<bool>& labels,
                                     std::vector<double> grid);

// `steps` evenly spaced thresholds over [min, max] of the scores, plus every
// observed score.
std::vector<double> default_grid(const std::vector<double>& scores, int steps = 200);

// Maximizes min(precision, recall); ties go to the higher F1, then to the
// lower threshold. Points with an undefined rate are skipped. Throws
// Error(NoValidPoint) when none remain.
double select_threshold(const std::vector<PrPoint>& curve);

struct MethodTiming {
  Method method = Method::Checksum;
  std::vector<double> samples_s;  // one wall time per repetition
  double mean_s = 0.0;
  double stddev_s = 0.0;
};

// Times each method over the full list `repetitions` times on the calling
// thread. Every run starts from the captured bytes: checksum recomputes the
// digests, pixel methods decode the images. `now` lets tests substitute a
// fake clock.
std::vector<MethodTiming> benchmark_methods(
    const std::vector<FrameSet>& framesets, const std::vector<Method>& methods, int repetitions,
    const MethodConfig& base = {},
    const std::function<std::chrono::steady_clock::time_point()>& now = &std::chrono::steady_clock::now);

}  // namespace camscout
