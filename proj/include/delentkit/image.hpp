// Copyright 2026 The delentkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DELENTKIT_IMAGE_HPP
#define DELENTKIT_IMAGE_HPP

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "delentkit/digest.hpp"
#include "delentkit/error.hpp"

namespace delentkit {

/// Number of gray levels of the canonical representation.
inline constexpr int kGrayLevels = 256;

/// 8-bit single-channel raster, row-major. Dimensions are always >= 1.
class GrayImage {
 public:
  GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : GrayImage(width, height,
                  std::vector<std::uint8_t>(checked_area(width, height), fill)) {}

  GrayImage(std::size_t width, std::size_t height,
            std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != checked_area(width, height)) {
      throw Error(Errc::InvalidArgument,
                  "pixel buffer length does not match width*height");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::uint8_t at(std::size_t x, std::size_t y) const noexcept {
    return pixels_[y * width_ + x];
  }
  std::uint8_t& at(std::size_t x, std::size_t y) noexcept {
    return pixels_[y * width_ + x];
  }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  static std::size_t checked_area(std::size_t w, std::size_t h) {
    if (w == 0 || h == 0) {
      throw Error(Errc::ZeroDimension,
                  "image dimensions must be >= 1 (got " + std::to_string(w) +
                      "x" + std::to_string(h) + ")");
    }
    return w * h;
  }

  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> pixels_;
};

enum class ImageFormat { Png, Pgm };

struct ImageSource {
  std::filesystem::path path;
  Digest content_hash{};
  ImageFormat format = ImageFormat::Png;
};

/// SHA-256 over (width u64 LE, height u64 LE, pixels row-major). Depends only
/// on the decoded raster, never on the encoded file.
inline Digest content_hash(const GrayImage& img) {
  Sha256 h;
  h.update_u64_le(img.width());
  h.update_u64_le(img.height());
  h.update(img.pixels());
  return h.finish();
}

/// Rounds half away from zero and clamps to the 8-bit range.
inline std::uint8_t clamp_round_u8(double v) noexcept {
  const double r = std::round(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

namespace detail {

/// BT.601 luma on integer channels in [0, maxval], mapped to [0, 255] with a
/// single half-up rounding step: round(255*(299R + 587G + 114B) / (1000*maxval)).
inline std::uint8_t luma_to_u8(std::uint64_t r, std::uint64_t g,
                               std::uint64_t b, std::uint64_t maxval) noexcept {
  const std::uint64_t num = 255 * (299 * r + 587 * g + 114 * b);
  const std::uint64_t den = 1000 * maxval;
  return static_cast<std::uint8_t>(std::min<std::uint64_t>(
      (2 * num + den) / (2 * den), 255));
}

inline std::uint8_t scale_to_u8(std::uint64_t v, std::uint64_t maxval) noexcept {
  return static_cast<std::uint8_t>(
      std::min<std::uint64_t>((2 * 255 * v + maxval) / (2 * maxval), 255));
}

inline bool has_png_signature(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline bool has_pgm_signature(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5';
}

struct PngMemoryReader {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

inline void png_read_from_memory(png_structp png, png_bytep out,
                                 png_size_t len) {
  auto* src = static_cast<PngMemoryReader*>(png_get_io_ptr(png));
  if (src->offset + len > src->bytes.size()) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, src->bytes.data() + src->offset, len);
  src->offset += len;
}

inline void png_silent_warning(png_structp, png_const_charp) {}

struct RawPng {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int channels = 0;   // 1 or 3 after transforms
  int bit_depth = 0;  // 8 or 16 after transforms
  std::vector<png_byte> data;
  std::vector<png_bytep> rows;
  char message[256] = {};
};

// Only trivially destructible locals live in this frame so that a longjmp
// out of libpng leaves nothing half-constructed.
inline bool png_decode_raw(png_structp png, png_infop info, RawPng& out) {
  if (setjmp(png_jmpbuf(png))) {
    return false;
  }
  png_read_info(png, info);
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const png_size_t stride = png_get_rowbytes(png, info);
  out.data.resize(stride * out.height);
  out.rows.resize(out.height);
  for (std::uint32_t y = 0; y < out.height; ++y) {
    out.rows[y] = out.data.data() + y * stride;
  }
  png_read_image(png, out.rows.data());
  png_read_end(png, nullptr);
  return true;
}

inline void png_store_error(png_structp png, png_const_charp msg) {
  auto* raw = static_cast<RawPng*>(png_get_error_ptr(png));
  std::snprintf(raw->message, sizeof(raw->message), "%s", msg);
  png_longjmp(png, 1);
}

}  // namespace detail

/// Decodes an in-memory PNG (1/2/4/8/16-bit, gray, RGB, palette, with or
/// without alpha) to canonical gray. Alpha and tRNS are ignored.
inline GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  if (!detail::has_png_signature(bytes)) {
    throw Error(Errc::UnsupportedFormat, "missing PNG signature");
  }
  detail::RawPng raw;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &raw,
                                           detail::png_store_error,
                                           detail::png_silent_warning);
  if (!png) throw Error(Errc::CorruptImage, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(Errc::CorruptImage, "png_create_info_struct failed");
  }
  detail::PngMemoryReader reader{bytes, 0};
  png_set_read_fn(png, &reader, detail::png_read_from_memory);
  const bool ok = detail::png_decode_raw(png, info, raw);
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw Error(Errc::CorruptImage, raw.message);
  if (raw.width == 0 || raw.height == 0) {
    throw Error(Errc::ZeroDimension, "PNG has zero dimension");
  }

  std::vector<std::uint8_t> gray(static_cast<std::size_t>(raw.width) *
                                 raw.height);
  const bool wide = raw.bit_depth == 16;
  const std::uint64_t maxval = wide ? 65535 : 255;
  for (std::uint32_t y = 0; y < raw.height; ++y) {
    const png_byte* row = raw.rows[y];
    for (std::uint32_t x = 0; x < raw.width; ++x) {
      auto sample = [&](int c) -> std::uint64_t {
        const std::size_t i = static_cast<std::size_t>(x) * raw.channels + c;
        return wide ? (std::uint64_t{row[2 * i]} << 8) | row[2 * i + 1]
                    : std::uint64_t{row[i]};
      };
      std::uint8_t v;
      if (raw.channels >= 3) {
        v = detail::luma_to_u8(sample(0), sample(1), sample(2), maxval);
      } else {
        v = detail::scale_to_u8(sample(0), maxval);
      }
      gray[static_cast<std::size_t>(y) * raw.width + x] = v;
    }
  }
  return GrayImage(raw.width, raw.height, std::move(gray));
}

/// Decodes binary PGM (P5). Any maxval in [1, 65535] is accepted; values are
/// rescaled to [0, 255] with half-up rounding.
inline GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (!detail::has_pgm_signature(bytes)) {
    throw Error(Errc::UnsupportedFormat, "missing P5 signature");
  }
  std::size_t pos = 2;
  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) -> std::uint64_t {
    skip_space_and_comments();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw Error(Errc::CorruptImage, std::string("PGM header: bad ") + what);
    }
    std::uint64_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > (1ULL << 32)) {
        throw Error(Errc::CorruptImage, std::string("PGM header: ") + what +
                                            " out of range");
      }
    }
    return v;
  };
  const std::uint64_t w = read_uint("width");
  const std::uint64_t h = read_uint("height");
  const std::uint64_t maxval = read_uint("maxval");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(Errc::CorruptImage, "PGM header not terminated");
  }
  ++pos;  // exactly one whitespace byte precedes the raster
  if (w == 0 || h == 0) throw Error(Errc::ZeroDimension, "PGM has zero dimension");
  if (maxval == 0 || maxval > 65535) {
    throw Error(Errc::CorruptImage, "PGM maxval out of range");
  }
  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(w * h);
  if (bytes.size() - pos < n * bps) {
    throw Error(Errc::CorruptImage, "PGM raster truncated");
  }
  std::vector<std::uint8_t> gray(n);
  const std::uint8_t* p = bytes.data() + pos;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t v =
        bps == 2 ? (std::uint64_t{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
    if (v > maxval) throw Error(Errc::CorruptImage, "PGM sample exceeds maxval");
    gray[i] = maxval == 255 ? static_cast<std::uint8_t>(v)
                            : detail::scale_to_u8(v, maxval);
  }
  return GrayImage(w, h, std::move(gray));
}

inline ImageFormat sniff_format(std::span<const std::uint8_t> bytes) {
  if (detail::has_png_signature(bytes)) return ImageFormat::Png;
  if (detail::has_pgm_signature(bytes)) return ImageFormat::Pgm;
  throw Error(Errc::UnsupportedFormat, "neither PNG nor binary PGM");
}

inline GrayImage decode_image(std::span<const std::uint8_t> bytes) {
  return sniff_format(bytes) == ImageFormat::Png ? decode_png(bytes)
                                                 : decode_pgm(bytes);
}

/// Loads a PNG or P5 PGM and converts it to 8-bit gray. Format is detected
/// from the file's magic bytes, not its extension.
inline GrayImage load_grayscale(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

inline ImageSource describe_source(const std::filesystem::path& path,
                                   const GrayImage& img) {
  const auto bytes = read_file_bytes(path);
  return ImageSource{path, content_hash(img), sniff_format(bytes)};
}

/// Bilinear resampling with half-pixel-centre mapping
/// (src = (dst + 0.5) * in/out - 0.5, clamped to the edge samples).
inline GrayImage resize_bilinear(const GrayImage& img, std::size_t target_w,
                                 std::size_t target_h) {
  if (target_w == 0 || target_h == 0) {
    throw Error(Errc::ZeroDimension, "resize target must be >= 1x1");
  }
  GrayImage out(target_w, target_h);
  const double sx = static_cast<double>(img.width()) / target_w;
  const double sy = static_cast<double>(img.height()) / target_h;
  const double max_x = static_cast<double>(img.width() - 1);
  const double max_y = static_cast<double>(img.height() - 1);

  struct Tap {
    std::size_t i0, i1;
    double frac;
  };
  auto taps = [](std::size_t n, double scale, double max_src) {
    std::vector<Tap> t(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::clamp((i + 0.5) * scale - 0.5, 0.0, max_src);
      const auto i0 = static_cast<std::size_t>(std::floor(s));
      const std::size_t i1 =
          std::min(i0 + 1, static_cast<std::size_t>(max_src));
      t[i] = {i0, i1, s - static_cast<double>(i0)};
    }
    return t;
  };
  const auto xt = taps(target_w, sx, max_x);
  const auto yt = taps(target_h, sy, max_y);

  for (std::size_t y = 0; y < target_h; ++y) {
    const Tap& ty = yt[y];
    for (std::size_t x = 0; x < target_w; ++x) {
      const Tap& tx = xt[x];
      const double top = (1.0 - tx.frac) * img.at(tx.i0, ty.i0) +
                         tx.frac * img.at(tx.i1, ty.i0);
      const double bottom = (1.0 - tx.frac) * img.at(tx.i0, ty.i1) +
                            tx.frac * img.at(tx.i1, ty.i1);
      out.at(x, y) = clamp_round_u8((1.0 - ty.frac) * top + ty.frac * bottom);
    }
  }
  return out;
}

/// Writes an 8-bit binary PGM.
inline void save_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot create " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.size()));
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

/// PNG channel layouts accepted by write_png.
enum class PngLayout { Gray, GrayAlpha, Rgb, Rgba };

/// Encodes interleaved samples (values in [0, 2^bit_depth - 1]) as PNG.
/// Intended for fixtures and exports; bit_depth is 8 or 16.
inline void write_png(const std::filesystem::path& path, std::size_t width,
                      std::size_t height, PngLayout layout, int bit_depth,
                      std::span<const std::uint16_t> samples) {
  static constexpr int kColor[] = {PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA,
                                   PNG_COLOR_TYPE_RGB, PNG_COLOR_TYPE_RGBA};
  const std::size_t channels = static_cast<std::size_t>(layout) + 1;
  const int color = kColor[static_cast<int>(layout)];
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(Errc::InvalidArgument, "PNG bit depth must be 8 or 16");
  }
  if (width == 0 || height == 0) {
    throw Error(Errc::ZeroDimension, "cannot encode empty PNG");
  }
  if (samples.size() != width * height * channels) {
    throw Error(Errc::InvalidArgument, "sample count does not match layout");
  }
  const std::size_t bps = bit_depth / 8;
  const std::size_t stride = width * channels * bps;
  std::vector<png_byte> data(stride * height);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (bps == 2) {
      data[2 * i] = static_cast<png_byte>(samples[i] >> 8);
      data[2 * i + 1] = static_cast<png_byte>(samples[i] & 0xFF);
    } else {
      data[i] = static_cast<png_byte>(samples[i]);
    }
  }
  std::vector<png_bytep> rows(height);
  for (std::size_t y = 0; y < height; ++y) rows[y] = data.data() + y * stride;

  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw Error(Errc::IoError, "cannot create " + path.string());
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  volatile bool ok = png && info;
  if (ok) {
    if (setjmp(png_jmpbuf(png))) {
      ok = false;
    } else {
      png_init_io(png, fp);
      png_set_IHDR(png, info, static_cast<png_uint_32>(width),
                   static_cast<png_uint_32>(height), bit_depth, color,
                   PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                   PNG_FILTER_TYPE_DEFAULT);
      png_write_info(png, info);
      png_write_image(png, rows.data());
      png_write_end(png, nullptr);
    }
  }
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
  if (!ok) throw Error(Errc::IoError, "PNG encode failed: " + path.string());
}

inline void save_png(const std::filesystem::path& path, const GrayImage& img) {
  std::vector<std::uint16_t> samples(img.pixels().begin(), img.pixels().end());
  write_png(path, img.width(), img.height(), PngLayout::Gray, 8, samples);
}

}  // namespace delentkit

#endif  // DELENTKIT_IMAGE_HPP
