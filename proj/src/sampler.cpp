#include "camscout/sampler.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <tuple>

#include <spdlog/spdlog.h>

#include "camscout/error.hpp"

namespace camscout {

SampleSchedule SampleSchedule::standard() {
  return SampleSchedule{{Duration{0}, Duration{5 * 60'000}, Duration{60 * 60'000}, Duration{12 * 3'600'000}}};
}

SampleSchedule SampleSchedule::parse(std::string_view text) {
  SampleSchedule schedule;
  std::istringstream in{std::string(text)};
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) schedule.offsets.push_back(parse_duration(item));
  }
  schedule.validate();
  return schedule;
}

void SampleSchedule::validate() const {
  if (offsets.empty()) throw Error(ErrorKind::InvalidConfig, "schedule has no offsets");
  if (offsets.front() != Duration{0}) throw Error(ErrorKind::InvalidConfig, "first offset must be 0");
  for (std::size_t i = 1; i < offsets.size(); ++i)
    if (offsets[i] <= offsets[i - 1])
      throw Error(ErrorKind::InvalidConfig, "schedule offsets must be strictly increasing");
}

std::string SampleSchedule::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (i) out += ',';
    out += format_duration(offsets[i]);
  }
  return out;
}

Frame make_frame(std::string bytes, Timestamp captured_at) {
  Frame frame;
  frame.captured_at = captured_at;
  frame.checksum = md5(bytes);
  try {
    frame.pixels = decode_grayscale(bytes);
  } catch (const Error& e) {
    spdlog::debug("frame decode failed: {}", e.what());
  }
  frame.bytes = std::move(bytes);
  return frame;
}

std::string link_id(std::string_view canonical_key) { return md5_hex(canonical_key).substr(0, 16); }

std::string FrameSet::id() const { return link_id(link.canonical_key); }

std::size_t FrameSet::present_count() const {
  return static_cast<std::size_t>(std::count_if(frames.begin(), frames.end(),
                                                [](const auto& f) { return f.has_value(); }));
}

std::optional<std::size_t> FrameSet::last_present() const {
  for (std::size_t i = frames.size(); i-- > 0;)
    if (frames[i]) return i;
  return std::nullopt;
}

namespace {

std::optional<Frame> capture(const DataLink& link, Clock& clock, Fetcher& fetcher, const SampleOptions& options) {
  const Url url = Url::parse(link.raw_url);
  for (int attempt = 0; attempt <= options.retries_per_offset; ++attempt) {
    try {
      RenderedPage page = fetch_following_redirects(fetcher, url, options.fetch);
      if (page.ok()) {
        Timestamp at = page.fetched_at == Timestamp{} ? clock.now() : page.fetched_at;
        return make_frame(std::move(page.html), at);
      }
      spdlog::debug("frame fetch {} -> HTTP {}", link.raw_url, page.status);
    } catch (const Error& e) {
      spdlog::debug("frame fetch {} failed: {}", link.raw_url, e.what());
    }
  }
  return std::nullopt;
}

}  // namespace

FrameSet sample_link(const DataLink& link, const SampleSchedule& schedule, Clock& clock, Fetcher& fetcher,
                     const SampleOptions& options) {
  auto outcome = sample_links({link}, schedule, clock, fetcher, options);
  if (outcome.front().error) throw Error(ErrorKind::AllSamplesFailed, *outcome.front().error);
  return std::move(*outcome.front().frameset);
}

std::vector<SampleOutcome> sample_links(const std::vector<DataLink>& links, const SampleSchedule& schedule,
                                        Clock& clock, Fetcher& fetcher, const SampleOptions& options) {
  schedule.validate();
  std::vector<FrameSet> sets(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    sets[i].link = links[i];
    sets[i].schedule = schedule;
    sets[i].frames.resize(schedule.offsets.size());
  }

  // (due, link index, offset index); earliest first, ties by link order.
  using Event = std::tuple<Timestamp, std::size_t, std::size_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> due;
  const Timestamp start = clock.now();
  for (std::size_t i = 0; i < links.size(); ++i) due.emplace(start, i, 0);

  while (!due.empty()) {
    auto [when, li, oi] = due.top();
    due.pop();
    clock.sleep_until(when);
    FrameSet& set = sets[li];
    if (oi == 0) set.t0 = clock.now();
    set.frames[oi] = capture(set.link, clock, fetcher, options);
    if (oi == 0 && set.frames[0]) set.t0 = set.frames[0]->captured_at;
    if (oi + 1 < schedule.offsets.size()) due.emplace(set.t0 + schedule.offsets[oi + 1], li, oi + 1);
  }

  std::vector<SampleOutcome> out(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (sets[i].present_count() == 0) {
      out[i].error = "every sample of " + links[i].raw_url + " failed";
    } else {
      out[i].frameset = std::move(sets[i]);
    }
  }
  return out;
}

}  // namespace camscout
