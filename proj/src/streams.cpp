#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include <spdlog/spdlog.h>

#include "camscout/error.hpp"
#include "camscout/identifier.hpp"

namespace camscout {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr == s.data()) return std::nullopt;
  return v;
}

std::optional<std::string> header_param(std::string_view content_type, std::string_view name) {
  std::string lowered = lower(content_type);
  std::size_t pos = lowered.find(std::string(name) + "=");
  if (pos == std::string::npos) return std::nullopt;
  std::string_view value = content_type.substr(pos + name.size() + 1);
  if (!value.empty() && value.front() == '"') {
    value.remove_prefix(1);
    return std::string(value.substr(0, value.find('"')));
  }
  return std::string(trim(value.substr(0, value.find(';'))));
}

const Url parse_stream_url(const DataLink& link) { return Url::parse(link.raw_url); }

RenderedPage fetch_playlist(Fetcher& fetcher, const Url& url, const ProbeOptions& options) {
  try {
    RenderedPage page = fetch_following_redirects(fetcher, url, FetchOptions{options.timeout, Duration{0}});
    if (!page.ok())
      throw Error(ErrorKind::StreamUnreachable, url.to_string() + " returned HTTP " + std::to_string(page.status));
    return page;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::StreamUnreachable) throw;
    throw Error(ErrorKind::StreamUnreachable, e.what());
  }
}

}  // namespace

HlsPlaylist parse_hls_playlist(std::string_view text) {
  HlsPlaylist pl;
  std::istringstream in{std::string(text)};
  std::string raw;
  bool header_seen = false;
  bool expect_variant_uri = false;
  bool expect_segment_uri = false;
  while (std::getline(in, raw)) {
    std::string_view line = trim(raw);
    if (!header_seen) {
      if (line.empty()) continue;
      if (line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
      if (line != "#EXTM3U") throw Error(ErrorKind::PlaylistMalformed, "missing #EXTM3U header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    if (line.front() != '#') {
      if (expect_variant_uri) {
        pl.variant_uris.emplace_back(line);
        expect_variant_uri = false;
      } else {
        pl.segment_uris.emplace_back(line);
        if (!expect_segment_uri) pl.segment_durations.push_back(0.0);
        expect_segment_uri = false;
      }
      continue;
    }
    auto colon = line.find(':');
    std::string_view tag = line.substr(0, colon);
    std::string_view value = colon == std::string_view::npos ? std::string_view{} : line.substr(colon + 1);
    if (tag == "#EXT-X-STREAM-INF") {
      pl.is_master = true;
      expect_variant_uri = true;
    } else if (tag == "#EXT-X-ENDLIST") {
      pl.has_end_list = true;
    } else if (tag == "#EXT-X-MEDIA-SEQUENCE") {
      if (auto v = to_double(value)) pl.media_sequence = static_cast<std::int64_t>(*v);
      else throw Error(ErrorKind::PlaylistMalformed, "bad media sequence");
    } else if (tag == "#EXT-X-TARGETDURATION") {
      pl.target_duration = to_double(value);
    } else if (tag == "#EXT-X-PLAYLIST-TYPE") {
      pl.playlist_type = std::string(trim(value));
    } else if (tag == "#EXT-X-PROGRAM-DATE-TIME") {
      if (!pl.first_program_date_time) {
        try {
          pl.first_program_date_time = parse_timestamp(trim(value));
        } catch (const Error&) {
          spdlog::debug("ignoring bad program-date-time '{}'", value);
        }
      }
    } else if (tag == "#EXTINF") {
      pl.segment_durations.push_back(to_double(value.substr(0, value.find(','))).value_or(0.0));
      expect_segment_uri = true;
    }
  }
  if (!header_seen) throw Error(ErrorKind::PlaylistMalformed, "empty playlist");
  return pl;
}

MjpegParts split_mjpeg(std::string_view content_type, std::string_view bytes) {
  MjpegParts out;
  auto boundary = header_param(content_type, "boundary");
  if (!boundary || boundary->empty()) return out;
  out.boundary = *boundary;
  std::string delim = boundary->starts_with("--") ? *boundary : "--" + *boundary;

  std::size_t pos = bytes.find(delim);
  while (pos != std::string_view::npos) {
    std::size_t header_start = pos + delim.size();
    if (bytes.substr(header_start, 2) == "--") break;  // closing delimiter
    std::size_t header_end = bytes.find("\r\n\r\n", header_start);
    std::size_t sep = 4;
    if (header_end == std::string_view::npos) {
      header_end = bytes.find("\n\n", header_start);
      sep = 2;
    }
    if (header_end == std::string_view::npos) break;
    std::string headers = lower(bytes.substr(header_start, header_end - header_start));
    std::size_t body_start = header_end + sep;
    std::optional<std::size_t> length;
    if (auto cl = headers.find("content-length:"); cl != std::string::npos) {
      if (auto v = to_double(std::string_view(headers).substr(cl + 15, headers.find('\n', cl) - cl - 15)))
        length = static_cast<std::size_t>(*v);
    }
    std::size_t next = bytes.find(delim, body_start);
    std::string_view body;
    if (length) {
      if (body_start + *length > bytes.size()) break;  // incomplete part
      body = bytes.substr(body_start, *length);
      next = bytes.find(delim, body_start + *length);
    } else {
      if (next == std::string_view::npos) break;
      body = bytes.substr(body_start, next - body_start);
      while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.remove_suffix(1);
    }
    if (body.size() >= 3 && static_cast<unsigned char>(body[0]) == 0xFF &&
        static_cast<unsigned char>(body[1]) == 0xD8)
      out.jpeg_parts.emplace_back(body);
    pos = next;
  }
  return out;
}

StreamProbe probe_stream(const DataLink& link, Fetcher& fetcher, const ProbeOptions& options) {
  if (link.kind != LinkKind::Stream || !link.stream_kind)
    throw Error(ErrorKind::InvalidConfig, link.raw_url + " is not a stream link");
  StreamProbe probe;
  probe.kind = *link.stream_kind;
  const Url url = parse_stream_url(link);

  switch (*link.stream_kind) {
    case StreamKind::RTMP:
    case StreamKind::RTSP:
      probe.probed = false;
      probe.detail = std::string(to_string(*link.stream_kind)) + " handshakes are not implemented";
      return probe;

    case StreamKind::HLS: {
      RenderedPage page = fetch_playlist(fetcher, url, options);
      HlsPlaylist pl = parse_hls_playlist(page.html);
      if (pl.is_master) {
        if (pl.variant_uris.empty()) throw Error(ErrorKind::PlaylistMalformed, "master playlist lists no variants");
        auto variant = try_resolve(Url::parse(page.url), pl.variant_uris.front());
        if (!variant) throw Error(ErrorKind::PlaylistMalformed, "bad variant URI");
        page = fetch_playlist(fetcher, *variant, options);
        pl = parse_hls_playlist(page.html);
        if (pl.is_master) throw Error(ErrorKind::PlaylistMalformed, "nested master playlists");
      }
      probe.probed = true;
      probe.playlist_is_live = !pl.has_end_list;
      if (pl.has_end_list) {
        double total = 0;
        for (double d : pl.segment_durations) total += d;
        probe.duration = total;
      }
      if (pl.first_program_date_time) {
        probe.start_time = static_cast<double>(to_unix_ms(*pl.first_program_date_time)) / 1000.0;
      } else {
        const double seq = static_cast<double>(pl.media_sequence.value_or(0));
        probe.start_time = seq * pl.target_duration.value_or(1.0);
      }
      probe.detail = "media-sequence " + std::to_string(pl.media_sequence.value_or(0)) +
                     (pl.has_end_list ? ", end-list present" : ", no end-list");
      return probe;
    }

    case StreamKind::MJPG: {
      StreamCapture capture;
      try {
        capture = fetcher.open_stream(url, options.mjpeg_max_bytes, options.timeout);
      } catch (const Error& e) {
        throw Error(ErrorKind::StreamUnreachable, e.what());
      }
      if (capture.status < 200 || capture.status >= 300)
        throw Error(ErrorKind::StreamUnreachable, url.to_string() + " returned HTTP " + std::to_string(capture.status));
      probe.probed = true;
      if (lower(capture.content_type).find("multipart/x-mixed-replace") == std::string::npos) {
        probe.mjpeg_parts = 0;
        probe.detail = "content type '" + capture.content_type + "' is not multipart";
        return probe;
      }
      MjpegParts parts = split_mjpeg(capture.content_type, capture.bytes);
      probe.mjpeg_parts = static_cast<int>(parts.jpeg_parts.size());
      probe.frames = std::move(parts.jpeg_parts);
      probe.detail = std::to_string(*probe.mjpeg_parts) + " multipart JPEG parts";
      return probe;
    }
  }
  return probe;
}

ClassificationResult classify_stream(const DataLink& link, const StreamProbe& probe, const FrameSet* frames,
                                     const MethodConfig& cfg) {
  ClassificationResult r;
  r.link = link;
  r.method = Method::StreamCheck;
  r.note = probe.detail;
  if (!probe.probed) {
    r.verdict = Verdict::Unprobed;
    return r;
  }
  bool live = false;
  if (probe.kind == StreamKind::HLS) {
    live = probe.playlist_is_live.value_or(false) && probe.start_time.value_or(0.0) > 0.0 && !probe.duration;
  } else if (probe.kind == StreamKind::MJPG) {
    live = probe.mjpeg_parts.value_or(0) >= 2;
  }
  r.score = live ? 1.0 : 0.0;
  r.threshold = 0.0;
  r.is_camera = live;
  if (frames) {
    r.score = luminance_score(*frames, cfg.luminance_fallback_to_latest);
    r.threshold = cfg.luminance_threshold;
    r.is_camera = live && r.score > r.threshold;
    for (std::size_t i = 0; i < frames->frames.size(); ++i)
      if (frames->frames[i]) r.frames_used.push_back(frames->schedule.offsets[i]);
  }
  return r;
}

}  // namespace camscout
