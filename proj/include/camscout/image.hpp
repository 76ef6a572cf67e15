#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace camscout {

// Single-channel 8-bit luminance, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}
  GrayImage(int w, int h, std::vector<std::uint8_t> px) : width(w), height(h), pixels(std::move(px)) {}

  std::size_t size() const { return pixels.size(); }
  bool empty() const { return pixels.empty(); }
  std::span<const std::uint8_t> view() const { return pixels; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

enum class ImageFormat { Unknown, Png, Jpeg };

ImageFormat sniff_image_format(std::string_view bytes);

// Rec. 601 luma, rounded half away from zero.
std::uint8_t luma601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Decodes PNG or JPEG (sniffed from the bytes, not the URL) to luminance.
// Throws Error(DecodeError) on unknown formats, truncated data, or any
// decoder warning.
GrayImage decode_grayscale(std::string_view bytes);

// Interleaved 8-bit samples; channels is 1 (gray) or 3 (RGB).
std::string encode_png(int width, int height, int channels, std::span<const std::uint8_t> samples);
std::string encode_jpeg(int width, int height, int channels, std::span<const std::uint8_t> samples,
                        int quality = 90);
inline std::string encode_png(const GrayImage& img) { return encode_png(img.width, img.height, 1, img.pixels); }

using Md5Digest = std::array<std::uint8_t, 16>;

Md5Digest md5(std::string_view bytes);
std::string to_hex(const Md5Digest& digest);
std::string md5_hex(std::string_view bytes);

}  // namespace camscout
