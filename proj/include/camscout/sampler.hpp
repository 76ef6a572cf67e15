#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camscout/clock.hpp"
#include "camscout/fetcher.hpp"
#include "camscout/image.hpp"
#include "camscout/linkmodel.hpp"

namespace camscout {

struct SampleSchedule {
  std::vector<Duration> offsets;

  // t0, t0+5min, t0+60min, t0+12h
  static SampleSchedule standard();
  // "0,5m,60m,12h"
  static SampleSchedule parse(std::string_view text);
  void validate() const;  // strictly increasing, first offset 0
  std::string to_string() const;
};

struct Frame {
  Timestamp captured_at{};
  std::string bytes;
  Md5Digest checksum{};
  std::optional<GrayImage> pixels;  // absent when decoding failed

  bool decode_ok() const { return pixels.has_value(); }
};

// Builds a frame from a payload: digest always, pixels when decodable.
Frame make_frame(std::string bytes, Timestamp captured_at);

struct FrameSet {
  DataLink link;
  SampleSchedule schedule;
  Timestamp t0{};
  std::vector<std::optional<Frame>> frames;  // one slot per offset; nullopt = Missing

  std::string id() const;
  std::size_t present_count() const;
  // Index of the last present frame, if any.
  std::optional<std::size_t> last_present() const;
};

// Stable identifier for everything derived from one link.
std::string link_id(std::string_view canonical_key);

struct SampleOptions {
  FetchOptions fetch{Duration{30'000}, Duration{0}};
  int retries_per_offset = 1;
};

// Fetches `link` once per schedule offset, sleeping on `clock` between
// captures. Failed offsets are left Missing. Throws Error(AllSamplesFailed)
// when nothing could be fetched.
FrameSet sample_link(const DataLink& link, const SampleSchedule& schedule, Clock& clock, Fetcher& fetcher,
                     const SampleOptions& options = {});

struct SampleOutcome {
  std::optional<FrameSet> frameset;
  std::optional<std::string> error;  // set for dead links
};

// Samples many links with interleaved schedules: each link's t0 is its first
// capture and every later capture is due at t0 + offset. Result order
// follows `links`.
std::vector<SampleOutcome> sample_links(const std::vector<DataLink>& links, const SampleSchedule& schedule,
                                        Clock& clock, Fetcher& fetcher, const SampleOptions& options = {});

}  // namespace camscout
