#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camscout/clock.hpp"
#include "camscout/fetcher.hpp"
#include "camscout/image.hpp"
#include "camscout/linkmodel.hpp"
#include "camscout/sampler.hpp"

namespace camscout {

enum class Method { Checksum, PercentDiff, LuminanceDiff, Cascade, StreamCheck };

std::string_view to_string(Method method);
Method method_from_string(std::string_view text);  // accepts CLI spellings too

struct MethodConfig {
  Method method = Method::LuminanceDiff;
  double percent_threshold = 0.11;
  double luminance_threshold = 1.3;
  // When the last scheduled frame is missing, compare against the latest
  // present frame instead of failing.
  bool luminance_fallback_to_latest = true;

  void validate() const;
};

enum class Verdict { Classified, Unprobed, Unclassifiable };
std::string_view to_string(Verdict verdict);
Verdict verdict_from_string(std::string_view text);

struct ClassificationResult {
  DataLink link;
  Method method = Method::LuminanceDiff;
  double score = 0.0;
  double threshold = 0.0;
  bool is_camera = false;
  Verdict verdict = Verdict::Classified;
  std::vector<Duration> frames_used;  // schedule offsets that fed the score
  std::string note;

  friend bool operator==(const ClassificationResult&, const ClassificationResult&) = default;
};

// Fraction of pixel positions whose values differ. Throws
// Error(DimensionMismatch) when sizes differ, Error(EmptyImage) on empty input.
double percent_diff(const GrayImage& a, const GrayImage& b);

// |mean(a) - mean(b)|; sizes may differ. Throws Error(EmptyImage).
double luminance_diff(const GrayImage& a, const GrayImage& b);

// True iff any later present frame's digest differs from frame 0's.
// Throws Error(InsufficientFrames) with fewer than two present frames or a
// missing first frame.
bool checksum_changed(const FrameSet& fs);

// Mean of percent_diff(frame0, frame_i) over later decoded frames; frames of
// other dimensions count as 1.0.
double percent_score(const FrameSet& fs);

// luminance_diff(frame0, last frame).
double luminance_score(const FrameSet& fs, bool fallback_to_latest = true);

// Pixels changed relative to frame 0, per later frame (nullopt where the
// frame is missing, undecodable or of other dimensions).
std::vector<std::optional<std::size_t>> pixel_change_counts(const FrameSet& fs);

// Applies one method to an image FrameSet. Throws Error(Unclassifiable) when
// no frame is present at all; other insufficiencies propagate as
// Error(InsufficientFrames).
ClassificationResult classify(const FrameSet& fs, const MethodConfig& cfg);

// ---- streams --------------------------------------------------------------

struct HlsPlaylist {
  bool is_master = false;
  std::vector<std::string> variant_uris;  // master playlists
  bool has_end_list = false;
  std::optional<std::int64_t> media_sequence;
  std::optional<double> target_duration;
  std::optional<Timestamp> first_program_date_time;
  std::optional<std::string> playlist_type;  // EVENT or VOD
  std::vector<double> segment_durations;
  std::vector<std::string> segment_uris;
};

// Throws Error(PlaylistMalformed) when the #EXTM3U header is missing.
HlsPlaylist parse_hls_playlist(std::string_view text);

struct MjpegParts {
  std::string boundary;
  std::vector<std::string> jpeg_parts;
};

// Splits a multipart/x-mixed-replace capture into JPEG payloads. Only parts
// that are complete are returned.
MjpegParts split_mjpeg(std::string_view content_type, std::string_view bytes);

struct StreamProbe {
  StreamKind kind = StreamKind::HLS;
  bool probed = false;  // false for RTMP/RTSP
  std::optional<double> start_time;
  std::optional<double> duration;
  std::optional<bool> playlist_is_live;  // HLS only
  std::optional<int> mjpeg_parts;        // MJPG only
  std::vector<std::string> frames;       // JPEG payloads captured from MJPG
  std::string detail;
};

struct ProbeOptions {
  Duration timeout{30'000};
  std::size_t mjpeg_max_bytes = 4 << 20;
};

// Opens a stream link and extracts liveness evidence. HLS: one level of
// master indirection, live = no #EXT-X-ENDLIST. MJPG: counts parts. RTMP and
// RTSP are returned unprobed. Throws Error(StreamUnreachable) or
// Error(PlaylistMalformed).
StreamProbe probe_stream(const DataLink& link, Fetcher& fetcher, const ProbeOptions& options = {});

// Camera iff the liveness check passes (HLS: live and start time > 0; MJPG:
// at least two parts) and, when frames are supplied, the luminance rule too.
ClassificationResult classify_stream(const DataLink& link, const StreamProbe& probe, const FrameSet* frames,
                                     const MethodConfig& cfg);

}  // namespace camscout
