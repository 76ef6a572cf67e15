#include <doctest.h>

#include <algorithm>
#include <random>

#include "camscout/error.hpp"
#include "camscout/identifier.hpp"
#include "test_support.hpp"

using namespace camscout;
using testsupport::frameset_of;
using testsupport::image_with_sum;

namespace {

// Naive double loop over coordinates, no kernels involved.
double percent_oracle(const GrayImage& a, const GrayImage& b) {
  long changed = 0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) changed += a.at(x, y) != b.at(x, y);
  return static_cast<double>(changed) / (static_cast<double>(a.width) * a.height);
}

long double mean_oracle(const GrayImage& img) {
  long double total = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) total += img.at(x, y);
  return total / (static_cast<long double>(img.width) * img.height);
}

MethodConfig method(Method m) {
  MethodConfig cfg;
  cfg.method = m;
  return cfg;
}

}  // namespace

TEST_CASE("defaults are 0.11 and 1.3 with the luminance method") {
  MethodConfig cfg;
  CHECK(cfg.method == Method::LuminanceDiff);
  CHECK(cfg.percent_threshold == 0.11);
  CHECK(cfg.luminance_threshold == 1.3);
}

TEST_CASE("luminance threshold decisions at 1.29 and 1.31") {
  // 100x100 pixels, so a sum difference of 12900 is a mean difference of 1.29.
  const GrayImage base = image_with_sum(100, 100, 100, 0);
  auto below = classify(frameset_of({base, base, base, image_with_sum(100, 100, 100, 12900)}), MethodConfig{});
  CHECK(below.score == doctest::Approx(1.29));
  CHECK_FALSE(below.is_camera);
  auto above = classify(frameset_of({base, base, base, image_with_sum(100, 100, 100, 13100)}), MethodConfig{});
  CHECK(above.score == doctest::Approx(1.31));
  CHECK(above.is_camera);
  // Exactly at the threshold is not above it.
  auto at = classify(frameset_of({base, base, base, image_with_sum(100, 100, 100, 13000)}), MethodConfig{});
  CHECK_FALSE(at.is_camera);
  // Direction does not matter.
  auto darker = classify(frameset_of({image_with_sum(100, 100, 100, 13100), base, base, base}), MethodConfig{});
  CHECK(darker.is_camera);
  CHECK(above.frames_used == std::vector<Duration>{Duration{0}, Duration{12 * 3'600'000}});
}

TEST_CASE("percent threshold decisions around 0.11") {
  const GrayImage base(100, 100, 50);
  auto changed = [&](int n) {
    GrayImage img = base;
    for (int i = 0; i < n; ++i) img.pixels[i] = 51;
    return img;
  };
  // Three later frames; the score is their mean.
  auto at = classify(frameset_of({base, changed(1100), changed(1100), changed(1100)}), method(Method::PercentDiff));
  CHECK(at.score == doctest::Approx(0.11));
  CHECK_FALSE(at.is_camera);
  auto above = classify(frameset_of({base, changed(1000), changed(1200), changed(1160)}), method(Method::PercentDiff));
  CHECK(above.score == doctest::Approx(0.112));
  CHECK(above.is_camera);
}

TEST_CASE("checksum flags any byte change") {
  const GrayImage a(8, 8, 1);
  GrayImage b = a;
  b.pixels[0] = 2;
  CHECK_FALSE(classify(frameset_of({a, a, a, a}), method(Method::Checksum)).is_camera);
  CHECK(classify(frameset_of({a, a, b, a}), method(Method::Checksum)).is_camera);
  // The first present frame is the reference when t0 is missing.
  CHECK_FALSE(classify(frameset_of({std::nullopt, a, a, a}), method(Method::Checksum)).is_camera);
  CHECK_THROWS_AS(classify(frameset_of({a, std::nullopt, std::nullopt, std::nullopt}), method(Method::Checksum)),
                  Error);
}

TEST_CASE("missing frames") {
  const GrayImage a = image_with_sum(10, 10, 100, 0), b = image_with_sum(10, 10, 110, 0);
  // Last frame missing: compare to the latest present one.
  auto r = classify(frameset_of({a, b, std::nullopt, std::nullopt}), MethodConfig{});
  CHECK(r.score == doctest::Approx(10.0));
  CHECK(r.frames_used == std::vector<Duration>{Duration{0}, Duration{5 * 60'000}});
  MethodConfig strict;
  strict.luminance_fallback_to_latest = false;
  try {
    classify(frameset_of({a, b, std::nullopt, std::nullopt}), strict);
    FAIL("expected InsufficientFrames");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientFrames);
  }
  try {
    classify(frameset_of({std::nullopt, std::nullopt, std::nullopt, std::nullopt}), MethodConfig{});
    FAIL("expected Unclassifiable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unclassifiable);
  }
}

TEST_CASE("differing dimensions") {
  const GrayImage small(4, 4, 10), big(8, 8, 10);
  CHECK_THROWS_AS(percent_diff(small, big), Error);
  CHECK(luminance_diff(small, big) == 0.0);
  CHECK(percent_score(frameset_of({small, big, big, big})) == 1.0);
  CHECK_THROWS_AS(luminance_diff(GrayImage(), small), Error);
}

TEST_CASE("cascade skips luminance when bytes never change") {
  const GrayImage a = image_with_sum(10, 10, 100, 0);
  auto r = classify(frameset_of({a, a, a, a}), method(Method::Cascade));
  CHECK_FALSE(r.is_camera);
  CHECK(r.note == "bytes never changed");
  auto moving = classify(frameset_of({a, a, a, image_with_sum(10, 10, 105, 0)}), method(Method::Cascade));
  CHECK(moving.is_camera);
  CHECK_THROWS_AS(classify(frameset_of({a, a}), method(Method::StreamCheck)), Error);
}

TEST_CASE("method names") {
  CHECK(method_from_string("checksum") == Method::Checksum);
  CHECK(method_from_string("percent") == Method::PercentDiff);
  CHECK(method_from_string("Luminance") == Method::LuminanceDiff);
  CHECK(method_from_string(to_string(Method::Cascade)) == Method::Cascade);
  CHECK_THROWS_AS(method_from_string("magic"), Error);
  MethodConfig bad;
  bad.percent_threshold = 2;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("property: kernels agree with naive oracles on random pairs") {
  std::mt19937 rng(31337);
  std::uniform_int_distribution<int> dim(1, 64), coin(0, 2);
  for (int i = 0; i < 1000; ++i) {
    const int w = dim(rng), h = dim(rng);
    GrayImage a = testsupport::random_image(rng, w, h);
    GrayImage b = coin(rng) == 0 ? a : testsupport::random_image(rng, w, h);
    if (coin(rng) == 0) b.pixels[rng() % b.size()] ^= 1;
    CHECK(percent_diff(a, b) == percent_oracle(a, b));
    const double lum = luminance_diff(a, b);
    CHECK(static_cast<long double>(lum) == doctest::Approx(static_cast<double>(std::abs(mean_oracle(a) - mean_oracle(b)))).epsilon(1e-12));
    // Symmetry, range, identity.
    CHECK(percent_diff(b, a) == percent_diff(a, b));
    CHECK(percent_diff(a, b) >= 0.0);
    CHECK(percent_diff(a, b) <= 1.0);
    CHECK(percent_diff(a, a) == 0.0);
    CHECK(luminance_diff(a, a) == 0.0);
  }
}

TEST_CASE("property: luminance ignores pixel order") {
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    GrayImage a = testsupport::random_image(rng, 16, 16);
    GrayImage b = a;
    std::shuffle(b.pixels.begin(), b.pixels.end(), rng);
    CHECK(luminance_diff(a, b) == doctest::Approx(0.0));
  }
}

TEST_CASE("property: checksum recall is perfect on PNG-encoded framesets") {
  // Any pixel change changes the encoded bytes, so whenever another method
  // sees a difference the checksum does too.
  std::mt19937 rng(9);
  for (int i = 0; i < 300; ++i) {
    GrayImage a = testsupport::random_image(rng, 12, 9);
    std::vector<std::optional<GrayImage>> imgs{a, a, a, a};
    if (rng() % 2) (*imgs[1 + rng() % 3]).pixels[rng() % a.size()] += 1;
    FrameSet fs = frameset_of(imgs);
    const bool pixels_moved = percent_score(fs) > 0.0;
    CHECK(checksum_changed(fs) == pixels_moved);
  }
}

TEST_CASE("pixel_change_counts reports per-frame counts") {
  const GrayImage a(4, 4, 0);
  GrayImage b = a;
  b.pixels[0] = b.pixels[1] = 9;
  auto counts = pixel_change_counts(frameset_of({a, b, std::nullopt, a}));
  REQUIRE(counts.size() == 3);
  CHECK(counts[0] == 2u);
  CHECK_FALSE(counts[1].has_value());
  CHECK(counts[2] == 0u);
}
