#include <doctest.h>

#include <cmath>
#include <random>

#include "camscout/error.hpp"
#include "camscout/evaluator.hpp"
#include "camscout/fixture.hpp"
#include "test_support.hpp"

using namespace camscout;

namespace {

std::vector<bool> repeat(std::vector<std::pair<bool, std::size_t>> runs) {
  std::vector<bool> out;
  for (auto [v, n] : runs) out.insert(out.end(), n, v);
  return out;
}

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

}  // namespace

TEST_CASE("eight of ten right") {
  std::vector<bool> pred{true, true, true, false, false, false, false, false, true, false};
  std::vector<bool> real{true, true, false, true, false, false, false, false, true, false};
  EvalReport r = compute_metrics(pred, real);
  CHECK(r.tp == 3);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 5);
  CHECK(*r.precision == doctest::Approx(0.75));
  CHECK(*r.recall == doctest::Approx(0.75));
  CHECK(r.accuracy == doctest::Approx(0.8));
}

TEST_CASE("rates with an empty denominator are absent") {
  EvalReport none = compute_metrics({false, false}, {false, false});
  CHECK_FALSE(none.precision.has_value());
  CHECK_FALSE(none.recall.has_value());
  CHECK(none.accuracy == 1.0);
  CHECK_THROWS_AS(compute_metrics({true}, {true, false}), Error);
  CHECK_THROWS_AS(compute_metrics({}, {}), Error);
}

TEST_CASE("confusion counts at the 0.11 and 1.3 operating points") {
  // 1,645 labeled cameras. Percent flags 1,683 links and luminance 1,637;
  // the true-positive counts follow from the recalls 0.985 and 0.982.
  const std::size_t cams = 1645;
  {
    const std::size_t tp = 1620, fp = 1683 - tp, fn = cams - tp, tn = 9778 - tp - fp - fn;
    auto pred = repeat({{true, tp}, {true, fp}, {false, fn}, {false, tn}});
    auto real = repeat({{true, tp}, {false, fp}, {true, fn}, {false, tn}});
    EvalReport r = compute_metrics(pred, real);
    CHECK(round3(*r.precision) == 0.963);
    CHECK(round3(*r.recall) == 0.985);
    CHECK(round3(r.accuracy) == 0.991);
  }
  {
    const std::size_t tp = 1615, fp = 1637 - tp, fn = cams - tp, tn = 8667 - tp - fp - fn;
    auto pred = repeat({{true, tp}, {true, fp}, {false, fn}, {false, tn}});
    auto real = repeat({{true, tp}, {false, fp}, {true, fn}, {false, tn}});
    EvalReport r = compute_metrics(pred, real);
    CHECK(round3(*r.precision) == 0.987);
    CHECK(round3(*r.recall) == 0.982);
    CHECK(round3(r.accuracy) == 0.994);
  }
  {
    // Checksum: every camera changes, so recall is 1 and the 416 extra
    // changed links are all false positives.
    const std::size_t tp = cams, fp = 2061 - cams;
    auto pred = repeat({{true, tp}, {true, fp}, {false, 5000}});
    auto real = repeat({{true, tp}, {false, fp}, {false, 5000}});
    EvalReport r = compute_metrics(pred, real);
    CHECK(*r.recall == 1.0);
    CHECK(r.fp == 416);
  }
}

TEST_CASE("property: metrics agree with a brute-force count") {
  std::mt19937 rng(1000);
  std::uniform_int_distribution<int> len(1, 300);
  std::bernoulli_distribution bit(0.4);
  for (int i = 0; i < 1000; ++i) {
    const int n = len(rng);
    std::vector<bool> pred(n), real(n);
    for (int k = 0; k < n; ++k) {
      pred[k] = bit(rng);
      real[k] = bit(rng);
    }
    int tp = 0, fp = 0, fn = 0, tn = 0;
    for (int k = 0; k < n; ++k) {
      if (pred[k] && real[k]) ++tp;
      if (pred[k] && !real[k]) ++fp;
      if (!pred[k] && real[k]) ++fn;
      if (!pred[k] && !real[k]) ++tn;
    }
    EvalReport r = compute_metrics(pred, real);
    CHECK(r.tp == static_cast<std::size_t>(tp));
    CHECK(r.fp == static_cast<std::size_t>(fp));
    CHECK(r.fn == static_cast<std::size_t>(fn));
    CHECK(r.tn == static_cast<std::size_t>(tn));
    CHECK(r.accuracy == doctest::Approx(double(tp + tn) / n));
    if (tp + fp) CHECK(*r.precision == doctest::Approx(double(tp) / (tp + fp)));
    if (tp + fn) CHECK(*r.recall == doctest::Approx(double(tp) / (tp + fn)));
  }
}

TEST_CASE("property: recall never rises as the threshold rises") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> score(0.0, 5.0);
  std::bernoulli_distribution bit(0.5);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> scores(50);
    std::vector<bool> labels(50);
    for (int k = 0; k < 50; ++k) {
      scores[k] = score(rng);
      labels[k] = bit(rng);
    }
    labels[0] = true;
    auto curve = threshold_sweep(scores, labels, default_grid(scores, 40));
    for (std::size_t k = 1; k < curve.size(); ++k) {
      CHECK(curve[k].threshold > curve[k - 1].threshold);
      CHECK(*curve[k].recall <= *curve[k - 1].recall);
    }
  }
}

TEST_CASE("select_threshold maximizes min(precision, recall)") {
  std::vector<PrPoint> curve{{0.5, 0.60, 1.00}, {1.0, 0.80, 0.90}, {1.3, 0.92, 0.88},
                             {2.0, 0.95, 0.70}, {3.0, std::nullopt, 0.0}};
  CHECK(select_threshold(curve) == 1.3);
  // Tie on the minimum: higher F1 wins, then the lower threshold.
  CHECK(select_threshold({{1.0, 0.8, 0.9}, {2.0, 0.8, 0.8}}) == 1.0);
  CHECK(select_threshold({{2.0, 0.8, 0.9}, {1.0, 0.9, 0.8}}) == 1.0);
  CHECK_THROWS_AS(select_threshold({{1.0, std::nullopt, 0.5}}), Error);
}

TEST_CASE("property: select_threshold matches an exhaustive search") {
  std::mt19937 rng(44);
  std::uniform_int_distribution<int> pct(0, 20);
  for (int i = 0; i < 500; ++i) {
    std::vector<PrPoint> curve;
    for (int k = 0; k < 12; ++k) {
      PrPoint p{k * 0.25, pct(rng) / 20.0, pct(rng) / 20.0};
      if (pct(rng) == 0) p.precision.reset();
      curve.push_back(p);
    }
    double best_min = -1;
    for (const auto& p : curve)
      if (p.precision && p.recall) best_min = std::max(best_min, std::min(*p.precision, *p.recall));
    if (best_min < 0) continue;
    const double t = select_threshold(curve);
    for (const auto& p : curve)
      if (p.threshold == t) CHECK(std::min(*p.precision, *p.recall) == best_min);
  }
}

TEST_CASE("property: separable scores select a threshold inside the gap") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> low(0.0, 1.0), high(2.0, 9.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> scores;
    std::vector<bool> labels;
    for (int k = 0; k < 30; ++k) {
      bool cam = k % 3 == 0;
      scores.push_back(cam ? high(rng) : low(rng));
      labels.push_back(cam);
    }
    const double max_neg = *std::max_element(scores.begin(), scores.end(), [&](double a, double b) {
      return (a < 2.0 ? a : -1) < (b < 2.0 ? b : -1);
    });
    double min_pos = 1e9;
    for (double s : scores)
      if (s >= 2.0) min_pos = std::min(min_pos, s);
    const double t = select_threshold(threshold_sweep(scores, labels, default_grid(scores)));
    CHECK(t >= max_neg);
    CHECK(t < min_pos);
    std::vector<bool> pred;
    for (double s : scores) pred.push_back(s > t);
    EvalReport r = compute_metrics(pred, labels);
    CHECK(*r.precision == 1.0);
    CHECK(*r.recall == 1.0);
  }
}

TEST_CASE("default grid covers the observed scores") {
  auto grid = default_grid({3.0, 1.0, 2.0, 1.0}, 5);
  CHECK(grid.front() == 1.0);
  CHECK(grid.back() == 3.0);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(std::adjacent_find(grid.begin(), grid.end()) == grid.end());
  CHECK(std::count(grid.begin(), grid.end(), 2.0) == 1);
  CHECK(grid.size() == 5);
  CHECK(default_grid({}).empty());
}

TEST_CASE("labeling protocol rejects cameras whose bytes never changed") {
  const GrayImage a(4, 4, 1);
  GrayImage b = a;
  b.pixels[3] = 2;
  FrameSet still = testsupport::frameset_of({a, a, a, a});
  CHECK_NOTHROW(check_label_protocol(still, Label::OtherWebAsset));
  try {
    check_label_protocol(still, Label::NetworkCamera);
    FAIL("expected LabelRejected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LabelRejected);
  }
  CHECK_NOTHROW(check_label_protocol(testsupport::frameset_of({a, a, b, a}), Label::NetworkCamera));
  CHECK(label_from_string(to_string(Label::NetworkCamera)) == Label::NetworkCamera);
  CHECK_THROWS_AS(label_from_string("Camera"), Error);
}

TEST_CASE("benchmark timings use the supplied clock") {
  auto sets = synthetic_framesets(4, 8, 8);
  auto tick = std::chrono::steady_clock::time_point{};
  int calls = 0;
  auto fake = [&] {
    // Each method run takes 1 s, 2 s, 3 s, ... of fake time.
    ++calls;
    if (calls % 2 == 0) tick += std::chrono::seconds(calls / 2);
    return tick;
  };
  auto t = benchmark_methods(sets, {Method::Checksum}, 3, {}, fake);
  REQUIRE(t.size() == 1);
  CHECK(t[0].samples_s == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(t[0].mean_s == doctest::Approx(2.0));
  CHECK(t[0].stddev_s == doctest::Approx(1.0));
  CHECK_THROWS_AS(benchmark_methods(sets, {Method::Checksum}, 0), Error);
}
